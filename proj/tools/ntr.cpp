// Command-line workbench for nonnegative tensor rank computations:
// constructions, rank bounds, approximation, identifiability predicates,
// cell classification, and seeded Monte Carlo experiments.
//
// Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.

#include "ntr/ntr.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool json_all_finite(const ntr::json& j) {
    if (j.is_number_float()) return std::isfinite(j.get<double>());
    if (j.is_structured())
        for (const auto& item : j)
            if (!json_all_finite(item)) return false;
    return true;
}

void emit(const ntr::json& j) {
    if (!json_all_finite(j)) throw NumericalFailure("non-finite values in report");
    std::cout << j.dump(2) << "\n";
}

void write_csv(const std::optional<std::string>& path, const std::string& content,
               const std::string& gnuplot = "") {
    if (!path) return;
    std::ofstream out(*path);
    if (!out) throw std::runtime_error("cannot write CSV file: " + *path);
    out << content;
    if (!gnuplot.empty()) {
        std::ofstream gp(*path + ".gp");
        if (gp) gp << gnuplot;
    }
}

ntr::Shape parse_shape(const std::vector<int>& dims) { return ntr::Shape(dims); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonnegative tensor rank workbench"};
    app.require_subcommand(1);

    // ---- construct ------------------------------------------------------
    auto* construct = app.add_subcommand("construct", "emit a built-in tensor as JSON");
    std::string kind;
    int latin_n = 3;
    construct->add_option("kind", kind, "latin | paper222")->required();
    construct->add_option("n", latin_n, "size for the latin construction");

    // shared solver knobs
    ntr::SolverConfig cfg;
    std::uint64_t seed = 1;
    auto add_solver_opts = [&](CLI::App* cmd) {
        cmd->add_option("--restarts", cfg.restarts, "independent random restarts");
        cmd->add_option("--max-iters", cfg.max_outer_iters, "max outer sweeps");
        cmd->add_option("--feas-tol", cfg.feas_tol, "relative zero-residual threshold");
        cmd->add_option("--stall-tol", cfg.stall_tol, "relative stall tolerance");
        cmd->add_option("--seed", seed, "base seed");
    };

    // ---- rank -----------------------------------------------------------
    auto* rank_cmd = app.add_subcommand("rank", "nonnegative rank bounds of a tensor");
    std::string tensor_path;
    int r_max = 8;
    rank_cmd->add_option("tensor", tensor_path, "tensor JSON file")->required();
    rank_cmd->add_option("--r-max", r_max, "largest rank probed for feasibility");
    add_solver_opts(rank_cmd);

    // ---- approx ---------------------------------------------------------
    auto* approx_cmd = app.add_subcommand("approx", "best rank-r approximation");
    int rank_r = 1;
    bool real_mode = false;
    double supp_eps = 1e-7;
    std::optional<std::string> save_decomp_path;
    approx_cmd->add_option("tensor", tensor_path, "tensor JSON file")->required();
    approx_cmd->add_option("--rank", rank_r, "number of rank-one terms")->required();
    approx_cmd->add_flag("--real", real_mode, "unconstrained (real) mode");
    approx_cmd->add_option("--supp-eps", supp_eps, "relative support threshold");
    approx_cmd->add_option("--save-decomposition", save_decomp_path,
                           "also write the best decomposition to this file");
    add_solver_opts(approx_cmd);

    // ---- cells ----------------------------------------------------------
    auto* cells_cmd = app.add_subcommand("cells", "support pattern and cell flags");
    std::string decomp_path;
    cells_cmd->add_option("decomposition", decomp_path, "decomposition JSON file")->required();
    cells_cmd->add_option("--supp-eps", supp_eps, "relative support threshold");

    // ---- identifiability --------------------------------------------------
    auto* ident_cmd = app.add_subcommand("identifiability", "identifiability predicates");
    std::vector<int> shape_dims;
    std::vector<int> symmetric_dn;
    ident_cmd->add_option("--shape", shape_dims, "tensor dimensions m,n,p")->delimiter(',');
    ident_cmd->add_option("--rank", rank_r, "rank r")->required();
    ident_cmd->add_option("--symmetric", symmetric_dn, "symmetric case: degree,d n")
        ->delimiter(',')
        ->expected(2);
    ident_cmd->add_option("--seed", seed, "base seed");

    // ---- generic-rank ---------------------------------------------------
    auto* grank_cmd = app.add_subcommand("generic-rank", "generic rank via the Terracini test");
    grank_cmd->add_option("--shape", shape_dims, "tensor dimensions")->delimiter(',')->required();
    grank_cmd->add_option("--seed", seed, "base seed");

    // ---- uniqueness -----------------------------------------------------
    auto* uniq_cmd = app.add_subcommand("uniqueness", "restart-clustering uniqueness evidence");
    double match_tol = 1e-5;
    uniq_cmd->add_option("tensor", tensor_path, "tensor JSON file")->required();
    uniq_cmd->add_option("--rank", rank_r, "rank r")->required();
    uniq_cmd->add_option("--match-tol", match_tol, "term-matching tolerance");
    add_solver_opts(uniq_cmd);

    // ---- typical --------------------------------------------------------
    auto* typical_cmd = app.add_subcommand("typical", "Monte Carlo typical-rank histogram");
    int samples = 100;
    std::optional<std::string> csv_path;
    typical_cmd->add_option("--shape", shape_dims, "tensor dimensions")->delimiter(',')->required();
    typical_cmd->add_option("--samples", samples, "number of sampled tensors")->required();
    typical_cmd->add_option("--r-max", r_max, "largest rank probed");
    typical_cmd->add_flag("--real", real_mode, "real-mode histogram");
    typical_cmd->add_option("--csv", csv_path, "write rank,count,fraction CSV here");
    add_solver_opts(typical_cmd);

    // ---- binaryform -----------------------------------------------------
    auto* bform_cmd = app.add_subcommand("binaryform", "distinct-real-roots experiment");
    int degree = 2;
    bform_cmd->add_option("--degree", degree, "form degree d")->required();
    bform_cmd->add_option("--samples", samples, "number of sampled forms")->required();
    bform_cmd->add_option("--seed", seed, "base seed");
    bform_cmd->add_option("--csv", csv_path, "write key,value CSV here");

    // ---- survey ---------------------------------------------------------
    auto* survey_cmd = app.add_subcommand("survey", "boundary/uniqueness survey of approximations");
    survey_cmd->add_option("--shape", shape_dims, "tensor dimensions")->delimiter(',')->required();
    survey_cmd->add_option("--rank", rank_r, "rank r")->required();
    survey_cmd->add_option("--samples", samples, "number of sampled tensors")->required();
    survey_cmd->add_option("--match-tol", match_tol, "term-matching tolerance");
    survey_cmd->add_option("--supp-eps", supp_eps, "relative support threshold");
    survey_cmd->add_option("--csv", csv_path, "write key,value CSV here");
    add_solver_opts(survey_cmd);

    // ---- coincidence ----------------------------------------------------
    auto* coin_cmd = app.add_subcommand("coincidence", "real/nonnegative rank coincidence");
    std::optional<std::string> explicit_tensor_path;
    coin_cmd->add_option("--shape", shape_dims, "tensor dimensions")->delimiter(',')->required();
    coin_cmd->add_option("--rank", rank_r, "rank r")->required();
    coin_cmd->add_option("--samples", samples, "number of planted tensors")->required();
    coin_cmd->add_option("--tensor", explicit_tensor_path, "also report on this explicit tensor");
    coin_cmd->add_option("--csv", csv_path, "write key,value CSV here");
    add_solver_opts(coin_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.seed = seed;
        if (construct->parsed()) {
            if (kind == "paper222") {
                emit(ntr::to_json(ntr::rank4_222_tensor()));
            } else if (kind == "latin") {
                emit(ntr::to_json(ntr::latin_square_tensor(latin_n)));
            } else {
                std::cerr << "unknown construction: " << kind << "\n";
                return 2;
            }
        } else if (rank_cmd->parsed()) {
            const ntr::Tensor a = ntr::load_tensor(tensor_path);
            emit(ntr::to_json(ntr::nonneg_rank_bounds(a, r_max, cfg), r_max));
        } else if (approx_cmd->parsed()) {
            const ntr::Tensor a = ntr::load_tensor(tensor_path);
            ntr::ApproximationResult res = real_mode ? ntr::als_solve_real(a, rank_r, cfg)
                                                     : ntr::nncp_solve(a, rank_r, cfg);
            if (!real_mode) {
                res.kkt = ntr::kkt_residuals(a, res.best, supp_eps);
                res.boundary = ntr::support_pattern(res.best, supp_eps);
            }
            if (save_decomp_path) ntr::save_json_file(*save_decomp_path, ntr::to_json(res.best));
            emit(ntr::to_json(res));
        } else if (cells_cmd->parsed()) {
            const ntr::Decomposition d = ntr::load_decomposition(decomp_path);
            emit(ntr::to_json(ntr::support_pattern(d, supp_eps)));
        } else if (ident_cmd->parsed()) {
            if (!symmetric_dn.empty()) {
                const int sd = symmetric_dn[0], sn = symmetric_dn[1];
                const ntr::Verdict v = ntr::symmetric_identifiable(sd, sn, rank_r);
                emit(ntr::json{{"symmetric", {{"d", sd}, {"n", sn}, {"r", rank_r},
                                              {"verdict", ntr::to_string(v)}}}});
            } else {
                if (shape_dims.empty()) {
                    std::cerr << "identifiability: --shape or --symmetric required\n";
                    return 2;
                }
                emit(ntr::to_json(
                    ntr::identifiability_report(parse_shape(shape_dims), rank_r, seed)));
            }
        } else if (grank_cmd->parsed()) {
            emit(ntr::to_json(ntr::generic_rank_estimate(parse_shape(shape_dims), seed)));
        } else if (uniq_cmd->parsed()) {
            const ntr::Tensor a = ntr::load_tensor(tensor_path);
            emit(ntr::to_json(ntr::uniqueness_by_restarts(a, rank_r, cfg, match_tol)));
        } else if (typical_cmd->parsed()) {
            const auto h = ntr::typical_rank_histogram(parse_shape(shape_dims), samples, r_max,
                                                       cfg, real_mode);
            write_csv(csv_path, ntr::histogram_csv(h),
                      csv_path ? ntr::histogram_gnuplot(*csv_path) : "");
            emit(ntr::to_json(h));
        } else if (bform_cmd->parsed()) {
            const auto rep = ntr::binary_form_experiment(degree, samples, seed);
            write_csv(csv_path, ntr::scalar_csv(ntr::to_json(rep)));
            emit(ntr::to_json(rep));
        } else if (survey_cmd->parsed()) {
            const auto rep = ntr::approximation_survey(parse_shape(shape_dims), rank_r, samples,
                                                       cfg, match_tol, supp_eps);
            write_csv(csv_path, ntr::scalar_csv(ntr::to_json(rep)));
            emit(ntr::to_json(rep));
        } else if (coin_cmd->parsed()) {
            std::optional<ntr::Tensor> explicit_tensor;
            if (explicit_tensor_path) explicit_tensor = ntr::load_tensor(*explicit_tensor_path);
            const auto rep = ntr::rank_coincidence_experiment(
                parse_shape(shape_dims), rank_r, samples, cfg,
                explicit_tensor ? &*explicit_tensor : nullptr);
            write_csv(csv_path, ntr::scalar_csv(ntr::to_json(rep)));
            emit(ntr::to_json(rep));
        }
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
