#pragma once

#include "ntr/canonical.hpp"
#include "ntr/cells.hpp"
#include "ntr/experiments.hpp"
#include "ntr/identifiability.hpp"
#include "ntr/io.hpp"
#include "ntr/kkt.hpp"
#include "ntr/rank_bounds.hpp"
#include "ntr/solvers.hpp"

#include <json.hpp>

#include <string>
#include <vector>

// JSON views of the report types. All user-facing indices are 1-based.
namespace ntr {

inline json to_json(const SolverConfig& c) {
    return json{{"restarts", c.restarts},   {"max_outer_iters", c.max_outer_iters},
                {"inner_tol", c.inner_tol}, {"stall_tol", c.stall_tol},
                {"seed", c.seed},           {"feas_tol", c.feas_tol}};
}

inline json to_json(const MatchResult& m) {
    std::vector<int> assignment;
    for (int j : m.assignment) assignment.push_back(j + 1);
    return json{{"matched", m.matched},
                {"assignment", assignment},
                {"max_term_distance", m.max_term_distance}};
}

inline json to_json(const RankEstimate& e, int r_max = -1) {
    json j{{"lower", e.lower}, {"certified", e.certified}, {"evidence", e.evidence}};
    if (e.upper)
        j["upper"] = *e.upper;
    else
        j["upper"] = r_max >= 0 ? ">" + std::to_string(r_max) : "unknown";
    return j;
}

inline json to_json(const KktReport& k) {
    return json{{"max_inequality_violation", k.max_inequality_violation},
                {"max_support_equality_residual", k.max_support_equality_residual},
                {"tangent_orthogonality", k.tangent_orthogonality},
                {"eps_supp", k.eps_supp},
                {"inequality_violation", k.inequality_violation},
                {"support_equality_residual", k.support_equality_residual}};
}

inline json to_json(const CellPattern& p) {
    json modes = json::array();
    for (const auto& mode : p.zero_sets) {
        json terms = json::array();
        for (const auto& zs : mode) {
            std::vector<int> one_based;
            for (int i : zs) one_based.push_back(i + 1);
            terms.push_back(one_based);
        }
        modes.push_back(terms);
    }
    const auto cover = support_cover_check(p);
    return json{{"shape", p.dims},
                {"zero_index_sets", modes},
                {"eps_supp", p.eps_supp},
                {"trivial", p.trivial()},
                {"on_boundary", p.on_boundary()},
                {"admissible", p.admissible()},
                {"degenerate", p.degenerate},
                {"support_cover", std::vector<bool>(cover.begin(), cover.end())}};
}

inline json to_json(const ApproximationResult& r) {
    json j{{"input_norm", r.input_norm},
           {"residual", r.residual},
           {"relative_residual", r.input_norm > 0.0 ? r.residual / r.input_norm : 0.0},
           {"restart_residuals", r.restart_residuals},
           {"decomposition", to_json(r.best)}};
    if (r.kkt) j["kkt"] = to_json(*r.kkt);
    if (r.boundary) j["boundary"] = to_json(*r.boundary);
    return j;
}

inline json to_json(const DefectivityReport& d) {
    return json{{"defective", d.defective},
                {"jacobian_rank", d.jacobian_rank},
                {"expected_dim", d.expected_dim}};
}

inline json to_json(const GenericRankReport& g) {
    return json{{"shape", g.dims},
                {"r_g_estimate", g.r_g_estimate},
                {"expected_r_g", g.expected_r_g},
                {"per_r_jacobian_ranks", g.per_r_jacobian_ranks}};
}

inline json to_json(const IdentifiabilityReport& r) {
    json j{{"shape", r.dims},
           {"r", r.r},
           {"verdicts", r.verdicts},
           {"expected_dim", r.expected_dim},
           {"singular_value_gap", r.singular_value_gap}};
    if (r.jacobian_rank) j["jacobian_rank"] = *r.jacobian_rank;
    return j;
}

inline json to_json(const UniquenessVerdict& u) {
    json j{{"verdict", to_string(u.verdict)},
           {"clusters", u.clusters},
           {"successful_restarts", u.successful_restarts},
           {"residual_threshold", u.residual_threshold},
           {"matched_fraction", u.matched_fraction}};
    if (u.witness_a && u.witness_b) {
        j["witness_a"] = to_json(*u.witness_a);
        j["witness_b"] = to_json(*u.witness_b);
        j["witness_cells_differ"] = u.witness_cells_differ;
    }
    return j;
}

inline json to_json(const RankHistogram& h) {
    json per_rank = json::array();
    for (std::size_t r = 0; r < h.counts.size(); ++r)
        per_rank.push_back(json{{"rank", r},
                                {"count", h.counts[r]},
                                {"fraction", h.fractions[r]}});
    return json{{"shape", h.dims},
                {"samples", h.samples},
                {"r_max", h.r_max},
                {"seed", h.seed},
                {"mode", h.real_mode ? "real" : "nonnegative"},
                {"sampling", h.sampling},
                {"heuristic", h.heuristic},
                {"histogram", per_rank},
                {"count_over_r_max", h.count_over},
                {"fraction_over_r_max", h.fraction_over},
                {"solver", to_json(h.cfg)}};
}

inline json to_json(const BinaryFormReport& b) {
    return json{{"degree", b.degree},
                {"samples", b.samples},
                {"seed", b.seed},
                {"count_d_distinct_real_roots", b.distinct_count},
                {"fraction", b.fraction},
                {"standard_error", b.standard_error},
                {"sampling", b.sampling}};
}

inline json to_json(const SurveyReport& s) {
    return json{{"shape", s.dims},
                {"r", s.r},
                {"samples", s.samples},
                {"seed", s.seed},
                {"match_tol", s.match_tol},
                {"eps_supp", s.eps_supp},
                {"converged", s.converged},
                {"on_boundary", s.on_boundary},
                {"unique_evidence", s.unique_evidence},
                {"non_unique_witness", s.non_unique_witness},
                {"inconclusive", s.inconclusive},
                {"fraction_on_boundary", s.fraction_on_boundary},
                {"fraction_unique_evidence", s.fraction_unique_evidence},
                {"fraction_non_unique", s.fraction_non_unique},
                {"fraction_inconclusive", s.fraction_inconclusive},
                {"converged_nonboundary", s.converged_nonboundary},
                {"unique_among_converged_nonboundary", s.unique_among_converged_nonboundary},
                {"fraction_unique_among_converged_nonboundary",
                 s.fraction_unique_among_converged_nonboundary},
                {"max_kkt_inequality_violation", s.max_kkt_inequality_violation},
                {"max_kkt_tangent_orthogonality", s.max_kkt_tangent_orthogonality},
                {"solver", to_json(s.cfg)}};
}

inline json to_json(const ExplicitCoincidenceReport& e) {
    return json{{"flattening_lower", e.flattening_lower},
                {"real_residual", e.real_residual},
                {"nonneg_residual", e.nonneg_residual},
                {"real_fit", e.real_fit},
                {"nonneg_fit", e.nonneg_fit},
                {"coincident", e.coincident}};
}

inline json to_json(const CoincidenceReport& c) {
    json j{{"shape", c.dims},
           {"r", c.r},
           {"samples", c.samples},
           {"seed", c.seed},
           {"real_fit", c.real_fit},
           {"flattening_match", c.flattening_match},
           {"coincident", c.coincident},
           {"fraction", c.fraction},
           {"solver", to_json(c.cfg)}};
    if (c.explicit_report) j["explicit_tensor"] = to_json(*c.explicit_report);
    return j;
}

inline json to_json(const DirectSumRankReport& d, int r_max = -1) {
    return json{{"a", to_json(d.a, r_max)},
                {"b", to_json(d.b, r_max)},
                {"direct_sum", to_json(d.sum, r_max)},
                {"additive_consistent", d.additive_consistent},
                {"additive_exact", d.additive_exact}};
}

/// key,value CSV rows from a flat JSON object (scalars only).
inline std::string scalar_csv(const json& j) {
    std::string out = "key,value\n";
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it->is_structured()) continue;
        out += it.key();
        out += ",";
        out += it->is_string() ? it->get<std::string>() : it->dump();
        out += "\n";
    }
    return out;
}

/// rank,count,fraction CSV for a histogram.
inline std::string histogram_csv(const RankHistogram& h) {
    std::string out = "rank,count,fraction\n";
    for (std::size_t r = 0; r < h.counts.size(); ++r) {
        out += std::to_string(r) + "," + std::to_string(h.counts[r]) + "," +
               json(h.fractions[r]).dump() + "\n";
    }
    if (h.count_over > 0)
        out += ">" + std::to_string(h.r_max) + "," + std::to_string(h.count_over) + "," +
               json(h.fraction_over).dump() + "\n";
    return out;
}

/// Companion gnuplot script for a histogram CSV.
inline std::string histogram_gnuplot(const std::string& csv_path) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set style data histograms\n";
    s += "set style fill solid 0.6\n";
    s += "set xlabel 'rank'\n";
    s += "set ylabel 'fraction'\n";
    s += "plot '" + csv_path + "' skip 1 using 3:xtic(1) title 'fraction'\n";
    return s;
}

} // namespace ntr
