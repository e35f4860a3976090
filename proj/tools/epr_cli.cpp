// Command-line front end: verify a Hamiltonian at an exceptional point,
// compute its response strengths, run the perturbation/excitation/evolution
// experiments, generate model matrices, and drive the Monte Carlo ensembles.
//
// Exit codes: 0 success; 1 usage, I/O, or validation problems; 2 domain
// rejection (the input is well-formed but not the requested object, e.g. not
// an exceptional point or no steady state exists).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epr/ensemble.hpp"
#include "epr/ep.hpp"
#include "epr/io.hpp"
#include "epr/models.hpp"
#include "epr/response.hpp"
#include "epr/version.hpp"

using namespace epr;
using nlohmann::json;

namespace {

Complex parse_complex_flag(const std::string& text, const std::string& what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw InvalidInput(what + ": expected 're,im', got '" + text + "'");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw InvalidInput(what + ": cannot parse '" + text + "'");
    }
}

ComplexVector parse_vector_flag(const std::string& text, const std::string& what) {
    std::vector<double> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            parts.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw InvalidInput(what + ": cannot parse component '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (parts.size() < 2 || parts.size() % 2 != 0)
        throw InvalidInput(what + ": expected an even number of components re,im,...");
    ComplexVector v(parts.size() / 2);
    for (std::size_t i = 0; i < v.dim(); ++i) v[i] = Complex{parts[2 * i], parts[2 * i + 1]};
    return v;
}

double default_tolerance() {
    if (const char* env = std::getenv("EPR_DEFAULT_TOL")) {
        try {
            const double v = std::stod(env);
            if (v > 0.0) return v;
        } catch (const std::exception&) {
        }
        throw InvalidInput("EPR_DEFAULT_TOL: not a positive number");
    }
    return default_ep_tol;
}

json complex_list_to_json(const std::vector<Complex>& zs) {
    json out = json::array();
    for (const Complex& z : zs) out.push_back(complex_to_json(z));
    return out;
}

json vector_to_json(const ComplexVector& v) {
    json out = json::array();
    for (const Complex& z : v) out.push_back(complex_to_json(z));
    return out;
}

struct AnalyzeArgs {
    std::string matrix_file;
    std::string eep_text;
    int order = 0;
    double tol = 0.0;
    std::vector<double> pseudo_eps;
};

int cmd_analyze(const AnalyzeArgs& args) {
    const MatrixDocument doc = load_matrix_document(args.matrix_file);
    const int n = static_cast<int>(doc.matrix.rows());
    const int order = args.order > 0 ? args.order : doc.order.value_or(n);
    const double tol = args.tol > 0.0 ? args.tol : default_tolerance();

    bool estimated = false;
    Complex eep;
    if (!args.eep_text.empty()) {
        eep = parse_complex_flag(args.eep_text, "--eep");
    } else if (doc.eigenvalue_ep) {
        eep = *doc.eigenvalue_ep;
    } else {
        eep = estimate_ep_eigenvalue(doc.matrix);
        estimated = true;
    }

    const EpCertificate cert = verify_ep(doc.matrix, eep, order, tol);
    json out{{"format_version", format_version},
             {"version", version_string},
             {"n", n},
             {"order", order},
             {"eigenvalue_ep", complex_to_json(eep)},
             {"eigenvalue_ep_estimated", estimated},
             {"tolerance", tol},
             {"certificate",
              {{"ok", cert.ok},
               {"nilpotency_residual", cert.nilpotency_residual},
               {"rank_of_n", cert.rank_of_n},
               {"diagnostics", cert.diagnostics}}}};
    if (!cert.ok) {
        std::cout << out.dump(2) << "\n";
        return 2;
    }

    const EpSystem sys = build_ep_system(doc.matrix, eep, order, tol);
    out["xi"] = sys.xi;
    out["zeta"] = sys.zeta;

    const PassivityReport pass = passivity_report(sys);
    out["gamma_eigenvalues"] = pass.gamma_eigenvalues;
    out["is_passive"] = pass.is_passive;
    out["trace_check"] = pass.trace_check;
    out["xi_upper_bound"] = pass.xi_upper_bound ? json(*pass.xi_upper_bound) : json(nullptr);
    out["gamma_eigenvalue_ratio"] =
        pass.eigenvalue_ratio ? json(*pass.eigenvalue_ratio) : json(nullptr);
    out["passive_bound_violated"] = pass.bound_violated;

    json radii = json::array();
    for (double et : args.pseudo_eps)
        radii.push_back({{"eps_tilde", et}, {"radius", pseudospectral_radius(sys.xi, et, order)}});
    out["pseudospectral_radii"] = radii;

    std::cout << out.dump(2) << "\n";
    return 0;
}

EpSystem system_from_file(const std::string& path, const std::string& eep_text, int order_flag,
                          double tol_flag) {
    const MatrixDocument doc = load_matrix_document(path);
    const int n = static_cast<int>(doc.matrix.rows());
    const int order = order_flag > 0 ? order_flag : doc.order.value_or(n);
    const double tol = tol_flag > 0.0 ? tol_flag : default_tolerance();
    Complex eep;
    if (!eep_text.empty())
        eep = parse_complex_flag(eep_text, "--eep");
    else if (doc.eigenvalue_ep)
        eep = *doc.eigenvalue_ep;
    else
        eep = estimate_ep_eigenvalue(doc.matrix);
    return build_ep_system(doc.matrix, eep, order, tol);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Response strengths of small non-Hermitian Hamiltonians at exceptional points"};
    app.set_version_flag("--version", std::string(version_string));
    app.require_subcommand(1);

    // ---- analyze ----
    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Verify an EP and report xi, zeta, passivity");
    analyze->add_option("matrix", aa.matrix_file, "matrix document (JSON)")->required();
    analyze->add_option("--eep", aa.eep_text, "EP eigenvalue as re,im (default: file or trace/n)");
    analyze->add_option("--order", aa.order, "EP order (default: file or n)");
    analyze->add_option("--tol", aa.tol, "verification tolerance (default 1e-8 or EPR_DEFAULT_TOL)");
    analyze->add_option("--pseudo-eps", aa.pseudo_eps,
                        "pseudospectral radii for these eps_tilde values");

    // ---- perturb ----
    std::string p_matrix, p_h1, p_eep;
    int p_order = 0;
    double p_tol = 0.0, p_eps = 0.0;
    bool p_grid = false;
    auto* perturb_cmd = app.add_subcommand("perturb", "Perturb an EP system and report x, y");
    perturb_cmd->add_option("matrix", p_matrix, "matrix document (JSON)")->required();
    perturb_cmd->add_option("h1", p_h1, "perturbation matrix document (JSON)")->required();
    perturb_cmd->add_option("--eps", p_eps, "perturbation strength")->required();
    perturb_cmd->add_option("--eep", p_eep, "EP eigenvalue as re,im");
    perturb_cmd->add_option("--order", p_order, "EP order");
    perturb_cmd->add_option("--tol", p_tol, "verification tolerance");
    perturb_cmd->add_flag("--grid", p_grid, "also fit the splitting exponent on an eps grid");

    // ---- excite ----
    std::string e_matrix, e_p, e_pfile, e_eep;
    int e_order = 0;
    double e_tol = 0.0, e_power = 1.0, e_hbar = 1.0;
    std::optional<double> e_omega;
    auto* excite_cmd = app.add_subcommand("excite", "Steady-state response to a harmonic drive");
    excite_cmd->add_option("matrix", e_matrix, "matrix document (JSON)")->required();
    excite_cmd->add_option("--p", e_p, "excitation vector re,im,re,im,...");
    excite_cmd->add_option("--p-file", e_pfile, "excitation vector from a JSON file [[re,im],...]");
    excite_cmd->add_option("--omega", e_omega, "drive frequency (default: resonant Re(E_ep)/hbar)");
    excite_cmd->add_option("--power", e_power, "excitation power (default 1)");
    excite_cmd->add_option("--hbar", e_hbar, "hbar (default 1)");
    excite_cmd->add_option("--eep", e_eep, "EP eigenvalue as re,im");
    excite_cmd->add_option("--order", e_order, "EP order");
    excite_cmd->add_option("--tol", e_tol, "verification tolerance");

    // ---- evolve ----
    std::string v_matrix, v_psi0, v_psifile, v_eep;
    int v_order = 0;
    double v_tol = 0.0, v_t = 0.0, v_hbar = 1.0;
    auto* evolve_cmd = app.add_subcommand("evolve", "Propagate a state in the EP eigenspace");
    evolve_cmd->add_option("matrix", v_matrix, "matrix document (JSON)")->required();
    evolve_cmd->add_option("--psi0", v_psi0, "initial state re,im,re,im,...");
    evolve_cmd->add_option("--psi0-file", v_psifile, "initial state from a JSON file [[re,im],...]");
    evolve_cmd->add_option("--t", v_t, "evolution time")->required();
    evolve_cmd->add_option("--hbar", v_hbar, "hbar (default 1)");
    evolve_cmd->add_option("--eep", v_eep, "EP eigenvalue as re,im");
    evolve_cmd->add_option("--order", v_order, "EP order");
    evolve_cmd->add_option("--tol", v_tol, "verification tolerance");

    // ---- model ----
    std::string m_name, m_e0 = "0,0", m_a0 = "1,0", m_eep = "0,-0.5", m_out;
    double m_omega0 = 0.0, m_alpha = -1.0, m_g = 1.0;
    int m_n = 3;
    std::uint64_t m_seed = 1;
    auto* model_cmd = app.add_subcommand("model", "Write a model Hamiltonian as a matrix document");
    model_cmd
        ->add_option("name", m_name,
                     "asymmetric_backscattering | pt_dimer | pt_trimer | hatano_nelson | random_ep")
        ->required();
    model_cmd->add_option("--e0", m_e0, "diagonal energy re,im");
    model_cmd->add_option("--a0", m_a0, "coupling/backscattering re,im");
    model_cmd->add_option("--omega0", m_omega0, "frequency (pt models)");
    model_cmd->add_option("--alpha", m_alpha, "gain/loss (pt_dimer; default: equal to g)");
    model_cmd->add_option("--g", m_g, "coupling strength (pt models)");
    model_cmd->add_option("--n", m_n, "dimension (hatano_nelson, random_ep)");
    model_cmd->add_option("--eep", m_eep, "EP eigenvalue re,im (random_ep)");
    model_cmd->add_option("--seed", m_seed, "RNG seed (random_ep)");
    model_cmd->add_option("--out", m_out, "output file")->required();

    // ---- ensemble ----
    std::string s_config, s_out, s_format;
    int s_workers = 0;
    auto* ens_cmd = app.add_subcommand("ensemble", "Run a Monte Carlo study from a JSON config");
    ens_cmd->add_option("config", s_config, "EnsembleConfig JSON file")->required();
    ens_cmd->add_option("--out", s_out, "output histogram file")->required();
    ens_cmd->add_option("--format", s_format, "csv or json (default: by file extension)");
    ens_cmd->add_option("--workers", s_workers, "override worker count");

    try {
        app.parse(argc, argv);

        if (analyze->parsed()) return cmd_analyze(aa);

        if (perturb_cmd->parsed()) {
            if (!(p_eps > 0.0)) throw InvalidInput("perturb: --eps must be positive");
            EpSystem sys = system_from_file(p_matrix, p_eep, p_order, p_tol);
            const MatrixDocument h1 = load_matrix_document(p_h1);
            const PerturbationReport rep = perturb(sys, h1.matrix, p_eps);
            json out{{"format_version", format_version},
                     {"version", version_string},
                     {"epsilon", rep.epsilon},
                     {"h1_spectral_norm", rep.h1_spectral_norm},
                     {"eigenvalues", complex_list_to_json(rep.eigenvalues)},
                     {"x", rep.x},
                     {"y", rep.y}};
            json dn = json::array();
            for (const auto& d : rep.deltas) dn.push_back(norm(d));
            out["delta_norms"] = dn;
            if (p_grid) {
                const std::vector<double> grid{1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12};
                const SplittingFit fit = splitting_scaling_probe(sys, h1.matrix, grid);
                out["splitting_fit"] = {{"exponent", fit.exponent},
                                        {"epsilons", fit.epsilons},
                                        {"max_splittings", fit.max_splittings}};
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (excite_cmd->parsed()) {
            EpSystem sys = system_from_file(e_matrix, e_eep, e_order, e_tol);
            ComplexVector p;
            if (!e_p.empty()) {
                p = parse_vector_flag(e_p, "--p");
            } else if (!e_pfile.empty()) {
                const json j = load_json_file(e_pfile);
                if (!j.is_array()) throw InvalidInput("--p-file: expected a JSON array");
                p = ComplexVector(j.size());
                for (std::size_t i = 0; i < j.size(); ++i)
                    p[i] = complex_from_json(j[i], "--p-file");
            } else {
                throw InvalidInput("excite: provide --p or --p-file");
            }
            const double omega = e_omega ? *e_omega : sys.eigenvalue_ep.real() / e_hbar;
            const ExcitationReport rep = excite(sys, p, omega, e_power, e_hbar);
            json out{{"format_version", format_version},
                     {"version", version_string},
                     {"omega", rep.omega},
                     {"power", rep.power},
                     {"hbar", e_hbar},
                     {"steady_state", vector_to_json(rep.steady_state)},
                     {"steady_norm", rep.steady_norm},
                     {"z", rep.z},
                     {"leading_order_norm", rep.leading_order_norm},
                     {"genericity_ok", rep.genericity_ok}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (evolve_cmd->parsed()) {
            EpSystem sys = system_from_file(v_matrix, v_eep, v_order, v_tol);
            ComplexVector psi0;
            if (!v_psi0.empty()) {
                psi0 = parse_vector_flag(v_psi0, "--psi0");
            } else if (!v_psifile.empty()) {
                const json j = load_json_file(v_psifile);
                if (!j.is_array()) throw InvalidInput("--psi0-file: expected a JSON array");
                psi0 = ComplexVector(j.size());
                for (std::size_t i = 0; i < j.size(); ++i)
                    psi0[i] = complex_from_json(j[i], "--psi0-file");
            } else {
                throw InvalidInput("evolve: provide --psi0 or --psi0-file");
            }
            const DynamicsReport rep = evolve(sys, psi0, v_t, v_hbar);
            json out{{"format_version", format_version},
                     {"version", version_string},
                     {"t", rep.time},
                     {"hbar", rep.hbar},
                     {"state", vector_to_json(rep.state)},
                     {"ratio", rep.ratio},
                     {"bound", rep.bound}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (model_cmd->parsed()) {
            ModelInstance m;
            if (m_name == "asymmetric_backscattering") {
                m = asymmetric_backscattering(parse_complex_flag(m_e0, "--e0"),
                                              parse_complex_flag(m_a0, "--a0"));
            } else if (m_name == "pt_dimer") {
                m = pt_dimer(m_omega0, m_alpha < 0.0 ? m_g : m_alpha, m_g);
            } else if (m_name == "pt_trimer") {
                m = pt_trimer(m_omega0, m_g);
            } else if (m_name == "hatano_nelson") {
                m = hatano_nelson(parse_complex_flag(m_e0, "--e0"),
                                  parse_complex_flag(m_a0, "--a0"), m_n);
            } else if (m_name == "random_ep") {
                m = random_ep(m_n, parse_complex_flag(m_eep, "--eep"), m_seed);
            } else {
                std::cerr << "unknown model '" << m_name
                          << "'; valid names: asymmetric_backscattering, pt_dimer, pt_trimer, "
                             "hatano_nelson, random_ep\n";
                return 1;
            }
            MatrixDocument doc{m.h0, m.eigenvalue_ep, m.order};
            write_text_file(m_out, matrix_document_to_json(doc).dump(2) + "\n");
            json out{{"model", m.name}, {"at_ep", m.at_ep}, {"written", m_out}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (ens_cmd->parsed()) {
            EnsembleConfig cfg = load_ensemble_config(s_config);
            if (s_workers > 0) cfg.workers = s_workers;
            std::string format = s_format;
            if (format.empty())
                format = s_out.size() >= 5 && s_out.substr(s_out.size() - 5) == ".json" ? "json"
                                                                                        : "csv";
            const StudySample sample = collect_study(cfg);
            const HistogramData h = to_histogram(sample, cfg.bins);
            emit(h, s_out, format, &cfg);
            json out{{"format_version", format_version},
                     {"version", version_string},
                     {"study", study_name(cfg.study)},
                     {"written", s_out},
                     {"count_total", h.count_total},
                     {"count_accepted", h.count_accepted},
                     {"count_failed", h.count_failed},
                     {"acceptance_rate",
                      h.count_total ? static_cast<double>(h.count_accepted) /
                                          static_cast<double>(h.count_total)
                                    : 0.0},
                     {"summary", summary_to_json(h.summary)}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const NotAnEp& e) {
        std::cerr << "not an exceptional point: " << e.what() << "\n";
        return 2;
    } catch (const NoSteadyState& e) {
        std::cerr << "no steady state: " << e.what() << "\n";
        return 2;
    } catch (const OrthogonalEigenvector& e) {
        std::cerr << "domain rejection: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
