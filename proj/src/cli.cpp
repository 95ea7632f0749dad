#include "curvlab/cli.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/io.hpp"
#include "curvlab/numerics.hpp"
#include "curvlab/rng.hpp"
#include "curvlab/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace curvlab {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNoCertificate = 2;
constexpr int kExitVerificationFailed = 3;

struct CommonOptions {
    std::string model_path;
    std::string inline_json;
    std::string out_path;
    std::string format;
};

void add_common(CLI::App* cmd, CommonOptions& opts, const std::string& default_format) {
    cmd->add_option("--model", opts.model_path, "path to a model JSON document");
    cmd->add_option("--inline", opts.inline_json, "model JSON given directly on the command line");
    cmd->add_option("--out", opts.out_path, "write the result to this file instead of stdout");
    opts.format = default_format;
    cmd->add_option("--format", opts.format, "output format: json, csv or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
}

Json load_model_doc(const CommonOptions& opts) {
    if (!opts.model_path.empty() && !opts.inline_json.empty())
        throw ParseError("give either --model or --inline, not both");
    if (!opts.model_path.empty()) return parse_json_file(opts.model_path);
    if (!opts.inline_json.empty()) return parse_json_text(opts.inline_json);
    throw ParseError("a model is required (--model PATH or --inline JSON)");
}

void emit(const CommonOptions& opts, const std::string& text) {
    if (opts.out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(opts.out_path);
    if (!out) throw ParseError("cannot write " + opts.out_path);
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

std::vector<int> parse_id_list(const std::string& text) {
    std::vector<int> ids;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) ids.push_back(std::stoi(item));
    return ids;
}

// "--split H1=0,1;H2=2,3"
std::pair<std::vector<int>, std::vector<int>> parse_split(const std::string& text) {
    std::vector<int> h1, h2;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw ParseError("bad --split syntax, expected H1=..;H2=..");
        const std::string name = part.substr(0, eq);
        const std::vector<int> ids = parse_id_list(part.substr(eq + 1));
        if (name == "H1")
            h1 = ids;
        else if (name == "H2")
            h2 = ids;
        else
            throw ParseError("bad --split set name: " + name);
    }
    if (h1.empty() || h2.empty()) throw ParseError("--split needs both H1 and H2");
    return {h1, h2};
}

std::vector<CurvatureCertificate> run_criteria(const BuiltModel& model,
                                               const std::optional<std::string>& split_arg) {
    std::vector<CurvatureCertificate> certs;
    const CommutativityReport comm = commutativity_report(model.rep);
    if (comm.essentially_commutative)
        certs.push_back(lambda_criterion(model.rep, model.chain.pi));
    if (split_arg) {
        const auto [h1, h2] = parse_split(*split_arg);
        certs.push_back(split_lambda_criterion(model.rep, model.chain.pi, h1, h2));
    } else if (model.natural_split) {
        certs.push_back(split_lambda_criterion(model.rep, model.chain.pi,
                                               model.natural_split->first,
                                               model.natural_split->second));
    }
    if (comm.involutive) certs.push_back(epsilon_corollary(model.rep, model.chain.pi));
    if (model.cayley) certs.push_back(cayley_certificate(*model.cayley));
    return certs;
}

std::optional<double> best_bound(const std::vector<CurvatureCertificate>& certs) {
    std::optional<double> best;
    for (const auto& cert : certs)
        if (cert.valid && (!best || cert.bound > *best)) best = cert.bound;
    return best;
}

std::string certificates_table(const BuiltModel& model,
                               const std::vector<CurvatureCertificate>& certs) {
    std::ostringstream os;
    os << "model: " << model.type << "  states: " << model.space.size()
       << "  moves: " << model.rep.n_moves() << "\n";
    for (const auto& [key, value] : model.info.items())
        os << "  " << key << " = " << value.dump() << "\n";
    for (const auto& cert : certs) {
        os << criterion_name(cert.criterion) << ": ";
        if (cert.valid)
            os << "bound = " << format_double(cert.bound);
        else
            os << "no certificate" << (cert.note.empty() ? "" : " (" + cert.note + ")");
        os << "\n";
        for (const auto& [key, value] : cert.intermediates)
            os << "    " << key << " = " << format_double(value) << "\n";
    }
    const auto best = best_bound(certs);
    if (best)
        os << "best certified lower bound: " << format_double(*best) << "\n";
    else
        os << "no criterion produced a valid certificate\n";
    return os.str();
}

int cmd_bound(const CommonOptions& common, const std::optional<std::string>& split_arg) {
    const BuiltModel model = build_model(load_model_doc(common));
    const auto certs = run_criteria(model, split_arg);
    if (common.format == "json") {
        Json doc;
        doc["model"] = model.type;
        doc["info"] = model.info;
        Json arr = Json::array();
        for (const auto& cert : certs) arr.push_back(certificate_to_json(cert));
        doc["certificates"] = std::move(arr);
        const auto best = best_bound(certs);
        if (best) doc["best_bound"] = *best;
        emit(common, doc.dump(2));
    } else {
        emit(common, certificates_table(model, certs));
    }
    return best_bound(certs) ? kExitOk : kExitNoCertificate;
}

struct ScanRow {
    double beta;
    double epsilon;
    double lambda;
    double bound;
};

int cmd_scan(const CommonOptions& common, double beta_min, double beta_max, int steps,
             bool log_spaced, bool display) {
    Json doc = load_model_doc(common);
    const std::string type = doc.value("type", "");
    const bool parametrized = type == "ising" || type == "curie_weiss" || type == "lattice_ising";
    if (!parametrized) throw ParseError("scan needs a beta-parameterized model");
    if (steps < 2) throw ParseError("scan needs at least 2 steps");
    if (log_spaced && !(beta_min > 0.0)) throw ParseError("log spacing needs beta-min > 0");

    std::function<double(double)> display_eps;
    if (display) {
        if (type == "lattice_ising") {
            doc["beta"] = beta_min;
            const BuiltModel probe = build_model(doc);
            const int dim = probe.info.at("dim").get<int>();
            display_eps = [dim](double b) { return lattice_display_epsilon(dim, b); };
        } else if (type == "curie_weiss") {
            display_eps = cw_simplified_epsilon;
        } else {
            throw ParseError("--display applies to lattice_ising and curie_weiss scans");
        }
    }

    std::vector<ScanRow> rows;
    std::function<double(double)> eps_of_beta;
    if (display) {
        eps_of_beta = display_eps;
    } else {
        eps_of_beta = [&doc](double b) {
            Json copy = doc;
            copy["beta"] = b;
            return ising_epsilon(ising_spec_from_json(copy));
        };
    }

    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / (steps - 1);
        const double beta = log_spaced
                                ? std::exp(std::log(beta_min) +
                                           t * (std::log(beta_max) - std::log(beta_min)))
                                : beta_min + t * (beta_max - beta_min);
        ScanRow row{beta, 0.0, std::nan(""), std::nan("")};
        if (display) {
            row.epsilon = display_eps(beta);
        } else {
            Json copy = doc;
            copy["beta"] = beta;
            const BuiltModel model = build_model(copy);
            row.epsilon = model.info.at("epsilon").get<double>();
            const CurvatureCertificate cert = lambda_criterion(model.rep, model.chain.pi);
            row.lambda = cert.intermediates.at("lambda");
            if (cert.valid) row.bound = cert.bound;
        }
        rows.push_back(row);
    }

    // Mark the epsilon = 1 crossing with the bisection root when it falls
    // inside the scanned range.
    std::optional<double> crossing;
    if (!rows.empty() && rows.front().epsilon < 1.0 && rows.back().epsilon >= 1.0) {
        double lo = beta_min;
        double hi = beta_max;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].epsilon >= 1.0) {
                lo = rows[i - 1].beta;
                hi = rows[i].beta;
                break;
            }
        while (hi - lo > 1e-8) {
            const double mid = 0.5 * (lo + hi);
            (eps_of_beta(mid) < 1.0 ? lo : hi) = mid;
        }
        crossing = 0.5 * (lo + hi);
    }

    if (common.format == "json") {
        Json out;
        out["model"] = type;
        Json arr = Json::array();
        for (const auto& row : rows)
            arr.push_back(Json{{"beta", row.beta},
                               {"epsilon", row.epsilon},
                               {"lambda", row.lambda},
                               {"bound", row.bound}});
        out["rows"] = std::move(arr);
        if (crossing) out["crossing_beta"] = *crossing;
        emit(common, out.dump(2));
    } else {
        std::ostringstream os;
        os << "beta,epsilon,lambda,bound\n";
        for (const auto& row : rows)
            os << format_double(row.beta) << ',' << format_double(row.epsilon) << ','
               << format_double(row.lambda) << ',' << format_double(row.bound) << "\n";
        if (crossing) os << "# crossing_beta = " << format_double(*crossing) << "\n";
        emit(common, os.str());
    }
    return kExitOk;
}

int cmd_verify(const CommonOptions& common, const ScanOptions& opts,
               std::optional<double> expect_bound, bool oracle_b) {
    const BuiltModel model = build_model(load_model_doc(common));
    double kappa = 0.0;
    if (expect_bound) {
        kappa = *expect_bound;
    } else {
        const auto best = best_bound(run_criteria(model, std::nullopt));
        if (best) kappa = *best;
    }

    const VerificationReport report = verify_certificate(model.chain, model.rep, kappa, opts);
    Json doc = report_to_json(report);
    doc["model"] = model.type;

    if (oracle_b) {
        // Dual-formula check of the Hessian form on a few random pairs.
        Rng rng(opts.seed ^ 0xb0c4e5ULL);
        double worst = 0.0;
        for (int s = 0; s < 8; ++s) {
            Eigen::VectorXd w(model.rep.n_states());
            Eigen::VectorXd psi(model.rep.n_states());
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                w(i) = 1e-6 + rng.exponential();
                psi(i) = rng.normal();
            }
            const Density rho = make_density(model.chain.pi, w);
            const double fast = hessian_B(model.rep, model.chain.pi, rho, psi);
            const double slow = hessian_B_oracle(model.rep, model.chain.pi, rho, psi);
            worst = std::max(worst,
                             std::abs(fast - slow) / std::max({1.0, std::abs(fast), std::abs(slow)}));
        }
        doc["oracle_b_max_rel_diff"] = worst;
    }

    if (common.format == "table") {
        std::ostringstream os;
        os << "kappa              " << format_double(report.kappa) << "\n"
           << "min B/A ratio      " << format_double(report.min_ratio) << "\n"
           << "spectral gap       " << format_double(report.spectral_gap) << "\n"
           << "MLSI min ratio     " << format_double(report.mlsi_min_ratio) << "\n"
           << "CED min slack      " << format_double(report.ced_min_gap) << "\n"
           << "samples            " << report.samples << "\n"
           << "seed               " << report.seed << " (" << report.rng << ")\n"
           << "checks             " << (report.all_ok() ? "all passed" : "FAILED") << "\n";
        emit(common, os.str());
    } else {
        emit(common, doc.dump(2));
    }
    return report.all_ok() ? kExitOk : kExitVerificationFailed;
}

int cmd_spectrum(const CommonOptions& common) {
    const BuiltModel model = build_model(load_model_doc(common));
    const double gap = spectral_gap(model.chain);
    if (common.format == "json") {
        Json doc;
        doc["model"] = model.type;
        doc["n_states"] = model.space.size();
        doc["spectral_gap"] = gap;
        emit(common, doc.dump(2));
    } else {
        emit(common, "spectral_gap " + format_double(gap));
    }
    return kExitOk;
}

int cmd_validate(const CommonOptions& common) {
    const Json doc = load_model_doc(common);
    std::ostringstream os;
    bool ok = true;
    if (doc.value("type", "chain") == "chain") {
        const ChainDocument parsed = chain_from_json(doc);
        MarkovChain chain;
        chain.space = parsed.space;
        KahanSum z;
        for (Eigen::Index x = 0; x < parsed.pi_weights.size(); ++x) z.add(parsed.pi_weights(x));
        chain.normalizer = z.value();
        chain.pi = parsed.pi_weights / chain.normalizer;
        chain.Q = Eigen::MatrixXd::Zero(parsed.pi_weights.size(), parsed.pi_weights.size());
        for (Eigen::Index x = 0; x < chain.Q.rows(); ++x)
            for (int d = 0; d < parsed.rep.n_moves(); ++d) {
                const double c = parsed.rep.rates(x, d);
                const std::int32_t y = parsed.rep.apply(d, static_cast<std::int32_t>(x));
                if (c > 0.0 && y != kOutside && y != static_cast<std::int32_t>(x))
                    chain.Q(x, y) += c;
            }
        const ValidationReport report = validate_chain(chain);
        ok = report.passed;
        os << "chain validation: " << (report.passed ? "pass" : "fail") << "\n";
        for (const auto& issue : report.issues)
            os << "  " << issue.kind << ": " << issue.message << "\n";
        try {
            validate_representation(parsed.rep, chain.pi);
            os << "representation validation: pass\n";
        } catch (const Error& e) {
            ok = false;
            os << "representation validation: fail (" << e.what() << ")\n";
        }
    } else {
        const BuiltModel model = build_model(doc);
        const ValidationReport report = validate_chain(model.chain);
        ok = report.passed;
        os << "model " << model.type << " builds " << model.space.size()
           << " states; validation " << (report.passed ? "pass" : "fail") << "\n";
    }
    emit(common, os.str());
    return ok ? kExitOk : kExitInputError;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"curvlab: certified entropic Ricci curvature bounds for finite Markov chains"};
    app.require_subcommand(1);

    CommonOptions bound_opts, scan_opts_common, verify_opts_common, spectrum_opts, validate_opts;
    std::string split_arg;
    auto* bound = app.add_subcommand("bound", "compute curvature certificates for a model");
    add_common(bound, bound_opts, "table");
    bound->add_option("--split", split_arg, "move split, e.g. H1=0,1;H2=2,3");

    auto* scan = app.add_subcommand("scan", "sweep beta and emit epsilon/lambda/bound columns");
    add_common(scan, scan_opts_common, "csv");
    double beta_min = 0.0, beta_max = 0.5;
    int beta_steps = 200;
    bool beta_log = false, display = false;
    scan->add_option("--beta-min", beta_min, "scan start (default 0)");
    scan->add_option("--beta-max", beta_max, "scan end (default 0.5)");
    scan->add_option("--beta-steps", beta_steps, "grid size (default 200)");
    scan->add_flag("--beta-log", beta_log, "log-spaced grid (needs beta-min > 0)");
    scan->add_flag("--display", display,
                   "scan the closed-form display bound instead of the exact epsilon");

    auto* verify = app.add_subcommand("verify", "numerically cross-check the certified bound");
    add_common(verify, verify_opts_common, "json");
    ScanOptions vopts;
    double expect_bound = std::numeric_limits<double>::quiet_NaN();
    bool oracle_b = false;
    verify->add_option("--samples", vopts.samples, "number of sampled (rho,psi) pairs");
    verify->add_option("--seed", vopts.seed, "RNG seed recorded in the report");
    verify->add_option("--refine", vopts.refine_top, "how many best samples to refine");
    verify->add_option("--expect-bound", expect_bound,
                       "verify against this bound instead of the computed certificate");
    verify->add_flag("--oracle-b", oracle_b, "also run the dual-formula Hessian check");

    auto* spectrum = app.add_subcommand("spectrum", "spectral gap of the chain");
    add_common(spectrum, spectrum_opts, "table");

    auto* validate = app.add_subcommand("validate", "check chain and representation invariants");
    add_common(validate, validate_opts, "table");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            std::cout << app.help();
            return kExitOk;
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (bound->parsed())
            return cmd_bound(bound_opts, split_arg.empty()
                                             ? std::nullopt
                                             : std::optional<std::string>(split_arg));
        if (scan->parsed())
            return cmd_scan(scan_opts_common, beta_min, beta_max, beta_steps, beta_log, display);
        if (verify->parsed())
            return cmd_verify(verify_opts_common, vopts,
                              std::isnan(expect_bound) ? std::nullopt
                                                       : std::optional<double>(expect_bound),
                              oracle_b);
        if (spectrum->parsed()) return cmd_spectrum(spectrum_opts);
        if (validate->parsed()) return cmd_validate(validate_opts);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

} // namespace curvlab
