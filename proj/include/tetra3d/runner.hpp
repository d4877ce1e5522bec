#pragma once

// Structured front end behind the command-line tool: a RunConfig describes
// one invocation, run() produces a versioned JSON report and an exit code.
// Reports are deterministic for a fixed config and seed; randomized sweeps
// draw everything from the embedded seed.
//
// Exit codes: 0 all checks passed, 1 an identity was violated,
// 2 usage error, 3 convergence not reached.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <random>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tetra3d/composite.hpp"
#include "tetra3d/fock.hpp"
#include "tetra3d/json_io.hpp"
#include "tetra3d/lattice.hpp"
#include "tetra3d/qpolynomial.hpp"
#include "tetra3d/rmatrix.hpp"
#include "tetra3d/sl2.hpp"
#include "tetra3d/tetrahedron.hpp"

namespace tetra3d {

enum class Mode { Exact, Float };

struct RunConfig {
    std::string command; // element, qpoly, verify-tetra, verify-map,
                         // verify-symmetry, verify-ybe, compare-sl2,
                         // compare-sixvertex, block, partition,
                         // transfer-build, transfer-commute, duality
    Mode mode = Mode::Exact;

    double q = 0.5;
    bool q_set = false;
    double tol = 1e-9;
    std::uint64_t seed = 1;
    unsigned threads = default_thread_count();

    // element / qpoly
    std::vector<int> idx;
    int n = 0, a1 = 0, a2 = 0, a3 = 0;
    bool hypergeometric = false;

    // verify flags
    int max_index = 1;
    bool dressed = false;
    int sample_count = 0;
    int sample_max_index = 3;
    int cutoff = 4;
    bool k3_cubed = false;
    std::string symmetry = "both"; // p13 | transpose | both

    // composite / sl2
    int chain_n = 1;
    int max_charge = 1;
    int charge_i = 0, charge_j = 0;
    int trials = 10;
    int max_rep = 2;
    double w = 0.1;

    // lattice
    int L = 1, M = 1, N = 1;
    double u = 0.3, v = 0.3, lattice_w = 0.25;
    double mu = 1.0;
    int sector = 0;
    bool full = false;
    int max_sector = 2;
    int max_power = 1;
    std::vector<double> pair1, pair2; // (v,w) pairs for commutation
    std::vector<int> cutoffs;
    std::string csv_spectra;

    std::string out_path;
};

struct RunResult {
    json report;
    int exit_code = 0;
};

namespace detail {

inline json float_params(const RunConfig& c) {
    json p = json::object();
    p["q"] = c.q;
    p["tol"] = c.tol;
    return p;
}

inline RunResult usage_error(json report, const std::string& message) {
    report["status"] = "usage_error";
    report["error"] = message;
    return {report, 2};
}

inline void finish(json& report, bool identity_ok, std::size_t checked,
                   const std::vector<std::string>& failures) {
    report["checked"] = checked;
    report["failures"] = failures;
    report["status"] = identity_ok ? "ok" : "identity_violated";
}

} // namespace detail

inline RunResult run(const RunConfig& cfg) {
    json report;
    report["schema"] = "tetra3d-report/1";
    report["command"] = cfg.command;
    report["mode"] = cfg.mode == Mode::Exact ? "exact" : "float";
    report["seed"] = cfg.seed;

    auto require_float = [&](const char* why) -> std::optional<RunResult> {
        if (cfg.mode == Mode::Exact)
            return detail::usage_error(
                report, std::string("exact mode cannot run this command (") +
                            why + "); pass --mode float");
        return std::nullopt;
    };

    try {
        if (cfg.command == "element") {
            if (cfg.idx.size() != 6)
                return detail::usage_error(report,
                                           "--idx needs six comma-separated "
                                           "non-negative integers");
            const SpinTuple6 t{cfg.idx[0], cfg.idx[1], cfg.idx[2],
                               cfg.idx[3], cfg.idx[4], cfg.idx[5]};
            report["idx"] = cfg.idx;
            report["poly"] = laurent_to_json(r_element(t));
            if (cfg.q_set) {
                if (auto e = require_float("numeric evaluation at q")) return *e;
                report["value_at_q"] = r_element_value(t, QValue(cfg.q));
            }
            report["status"] = "ok";
            report["failures"] = json::array();
            return {report, 0};
        }

        if (cfg.command == "qpoly") {
            report["n"] = cfg.n;
            report["a"] = {cfg.a1, cfg.a2, cfg.a3};
            const LaurentPoly& p = q_poly_recursive(cfg.n, cfg.a1, cfg.a2, cfg.a3);
            report["poly"] = laurent_to_json(p);
            if (cfg.hypergeometric) {
                const LaurentPoly h =
                    q_poly_hypergeometric(cfg.n, cfg.a1, cfg.a2, cfg.a3);
                report["hypergeometric_poly"] = laurent_to_json(h);
                report["routes_agree"] = (h == p);
                if (h != p) {
                    report["status"] = "identity_violated";
                    report["failures"] = {"hypergeometric route disagrees"};
                    return {report, 1};
                }
            }
            report["status"] = "ok";
            report["failures"] = json::array();
            return {report, 0};
        }

        if (cfg.command == "verify-tetra") {
            if (!cfg.dressed) {
                const TetraSweepReport sweep =
                    sweep_tetrahedron(cfg.max_index, cfg.threads);
                std::size_t checked = sweep.checked;
                std::vector<std::string> failures = sweep.failures;
                report["nonzero"] = sweep.nonzero;
                if (cfg.sample_count > 0) {
                    const TetraSweepReport sample = sample_tetrahedron(
                        cfg.sample_max_index, cfg.sample_count, cfg.seed,
                        cfg.threads);
                    checked += sample.checked;
                    failures.insert(failures.end(), sample.failures.begin(),
                                    sample.failures.end());
                    report["sample_nonzero"] = sample.nonzero;
                }
                detail::finish(report, failures.empty(), checked, failures);
                return {report, failures.empty() ? 0 : 1};
            }
            if (auto e = require_float("dressed weights")) return *e;
            report["params"] = detail::float_params(cfg);
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> pos(0.5, 2.0);
            DressParams6 d;
            for (auto& x : d.lambda) x = pos(rng);
            for (auto& x : d.mu) x = pos(rng);
            report["lambda"] = d.lambda;
            report["mu"] = d.mu;
            std::size_t checked = 0;
            std::vector<std::string> failures;
            const QValue qv(cfg.q);
            const int base = cfg.max_index + 1;
            std::uint64_t total = 1;
            for (int i = 0; i < 12; ++i) total *= base;
            for (std::uint64_t flat = 0; flat < total; ++flat) {
                TetraExternal ext;
                std::uint64_t rest = flat;
                for (int i = 0; i < 6; ++i) {
                    ext.n[i] = static_cast<int>(rest % base);
                    rest /= base;
                }
                for (int i = 0; i < 6; ++i) {
                    ext.npp[i] = static_cast<int>(rest % base);
                    rest /= base;
                }
                ++checked;
                const auto r = verify_tetrahedron_dressed(ext, d, qv, cfg.tol);
                if (!r.equal)
                    failures.push_back("dressed tetrahedron violated, dev " +
                                       std::to_string(r.rel_dev));
            }
            detail::finish(report, failures.empty(), checked, failures);
            return {report, failures.empty() ? 0 : 1};
        }

        if (cfg.command == "verify-map") {
            const VerifyReport r = verify_oscillator_map(
                cfg.cutoff, cfg.k3_cubed ? MapEq2Reading::KCubedLiteral
                                         : MapEq2Reading::KSquared);
            report["cutoff"] = cfg.cutoff;
            report["reading"] = cfg.k3_cubed ? "k3-cubed" : "k3-squared";
            detail::finish(report, r.ok(), r.checked, r.failures);
            return {report, r.ok() ? 0 : 1};
        }

        if (cfg.command == "verify-symmetry") {
            std::size_t checked = 0;
            std::vector<std::string> failures;
            if (cfg.symmetry == "p13" || cfg.symmetry == "both") {
                const VerifyReport r = verify_symmetry_p13(cfg.max_index);
                checked += r.checked;
                failures.insert(failures.end(), r.failures.begin(),
                                r.failures.end());
            }
            if (cfg.symmetry == "transpose" || cfg.symmetry == "both") {
                const VerifyReport r = verify_symmetry_transpose(cfg.max_index);
                checked += r.checked;
                failures.insert(failures.end(), r.failures.begin(),
                                r.failures.end());
            }
            detail::finish(report, failures.empty(), checked, failures);
            return {report, failures.empty() ? 0 : 1};
        }

        if (cfg.command == "verify-ybe") {
            if (auto e = require_float("spectral parameters")) return *e;
            report["params"] = detail::float_params(cfg);
            const QValue qv(cfg.q);
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> unit(0.05, 0.7);
            std::size_t checked = 0;
            std::vector<std::string> failures;
            double worst = 0.0;
            for (int t = 0; t < cfg.trials; ++t)
                for (int I = 0; I <= cfg.max_charge; ++I)
                    for (int J = 0; J <= cfg.max_charge; ++J)
                        for (int Jb = 0; Jb <= cfg.max_charge; ++Jb) {
                            const double w =
                                unit(rng) * std::pow(cfg.q, I + J);
                            const double wp = unit(rng) * w *
                                              std::pow(cfg.q, J + Jb);
                            const YbeReport r = verify_ybe_block(
                                cfg.chain_n, I, J, Jb, w, wp, qv, cfg.tol);
                            ++checked;
                            worst = std::max(worst, r.max_rel_dev);
                            if (!r.ok)
                                failures.push_back(
                                    "ybe violated in sector (" +
                                    std::to_string(I) + "," + std::to_string(J) +
                                    "," + std::to_string(Jb) + ")");
                        }
            report["max_rel_dev"] = worst;
            detail::finish(report, failures.empty(), checked, failures);
            return {report, failures.empty() ? 0 : 1};
        }

        if (cfg.command == "compare-sl2" || cfg.command == "compare-sixvertex") {
            if (auto e = require_float("spectral parameters")) return *e;
            report["params"] = detail::float_params(cfg);
            const QValue qv(cfg.q);
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> unit(0.05, 0.7);
            std::size_t checked = 0;
            std::vector<std::string> failures;
            json blocks = json::array();
            if (cfg.command == "compare-sl2") {
                for (int I = 0; I <= cfg.max_rep; ++I)
                    for (int J = 0; J <= cfg.max_rep; ++J)
                        for (int t = 0; t < cfg.trials; ++t) {
                            const double w = unit(rng) * std::pow(cfg.q, I + J);
                            const CompareReport r =
                                compare_composite_sl2(I, J, w, qv, cfg.tol);
                            ++checked;
                            blocks.push_back(json{{"I", I},
                                                  {"J", J},
                                                  {"w", w},
                                                  {"scalar", r.scalar},
                                                  {"max_rel_dev", r.max_rel_dev}});
                            if (!r.ok)
                                failures.push_back("sl2 proportionality failed");
                        }
            } else {
                for (int t = 0; t < cfg.trials; ++t) {
                    const double w = unit(rng) * cfg.q * cfg.q;
                    const CompareReport r =
                        compare_composite_six_vertex(w, qv, cfg.tol);
                    ++checked;
                    blocks.push_back(json{{"w", w},
                                          {"scalar", r.scalar},
                                          {"max_rel_dev", r.max_rel_dev}});
                    if (!r.ok) failures.push_back("six-vertex comparison failed");
                }
            }
            report["blocks"] = blocks;
            detail::finish(report, failures.empty(), checked, failures);
            return {report, failures.empty() ? 0 : 1};
        }

        if (cfg.command == "block") {
            if (auto e = require_float("generic w sums")) return *e;
            report["params"] = detail::float_params(cfg);
            const QValue qv(cfg.q);
            try {
                const CompositeBlock b = composite_block(
                    cfg.chain_n, cfg.charge_i, cfg.charge_j, cfg.w, qv, cfg.tol);
                report["n"] = b.n;
                report["charge_i"] = b.charge_i;
                report["charge_j"] = b.charge_j;
                report["w"] = b.w;
                report["basis_i"] = b.basis_i;
                report["basis_j"] = b.basis_j;
                json rows = json::array();
                const std::size_t d = b.dim();
                for (std::size_t r = 0; r < d; ++r) {
                    json row = json::array();
                    for (std::size_t c = 0; c < d; ++c) row.push_back(b.at(r, c));
                    rows.push_back(row);
                }
                report["entries"] = rows;
                report["tail_bound"] = b.max_tail_bound;
                report["status"] = "ok";
                report["failures"] = json::array();
                return {report, 0};
            } catch (const DivergenceError& e) {
                report["status"] = "convergence_not_reached";
                report["first_divergent_w"] = cfg.w;
                report["error"] = e.what();
                return {report, 3};
            }
        }

        if (cfg.command == "partition") {
            if (auto e = require_float("lattice sums")) return *e;
            LatticeSpec spec;
            spec.L = cfg.L;
            spec.M = cfg.M;
            spec.N = cfg.N;
            spec.q = cfg.q;
            spec.u = cfg.u;
            spec.v = cfg.v;
            spec.w = cfg.lattice_w;
            spec.mu = cfg.mu;
            spec.cutoff = cfg.cutoff;
            spec.tol = cfg.tol;
            report["params"] = {{"L", cfg.L},       {"M", cfg.M},
                                {"N", cfg.N},       {"q", cfg.q},
                                {"u", cfg.u},       {"v", cfg.v},
                                {"w", cfg.lattice_w}, {"mu", cfg.mu},
                                {"cutoff", cfg.cutoff}, {"sector", cfg.sector}};
            try {
                json series = json::array();
                for (int cap = 1; cap <= std::min(spec.cutoff + 2, 8); ++cap) {
                    TransferOptions capped;
                    capped.jk_cap = cap;
                    series.push_back(
                        partition_restricted(spec, cfg.sector, capped).value);
                }
                report["cutoff_series"] = series;
                if (cfg.full) {
                    const PartitionResult z = partition_full(spec, cfg.max_sector);
                    report["value"] = z.value;
                    report["tail_bound"] = z.tail_bound;
                    report["note"] = z.note;
                    report["warning"] =
                        "full-sum convergence is heuristic; an extra "
                        "sector-dependent damping factor may be required";
                    report["status"] = z.truncation_warning
                                           ? "convergence_not_reached"
                                           : "ok";
                    report["failures"] = json::array();
                    return {report, z.truncation_warning ? 3 : 0};
                }
                const PartitionResult z = partition_restricted(spec, cfg.sector);
                report["value"] = z.value;
                report["tail_bound"] = z.tail_bound;
                if (!z.note.empty()) report["note"] = z.note;
                report["status"] =
                    z.truncation_warning ? "convergence_not_reached" : "ok";
                report["failures"] = json::array();
                return {report, z.truncation_warning ? 3 : 0};
            } catch (const DivergenceError& e) {
                report["status"] = "convergence_not_reached";
                report["error"] = e.what();
                return {report, 3};
            }
        }

        if (cfg.command == "transfer-build") {
            if (auto e = require_float("lattice sums")) return *e;
            LatticeSpec spec;
            spec.M = cfg.M;
            spec.N = cfg.N;
            spec.q = cfg.q;
            spec.v = cfg.v;
            spec.w = cfg.lattice_w;
            spec.mu = cfg.mu;
            spec.cutoff = cfg.cutoff;
            spec.tol = cfg.tol;
            const TransferMatrix tm = transfer_matrix(spec, cfg.sector);
            report["dim"] = tm.dim();
            report["sector"] = cfg.sector;
            report["max_tail_bound"] = tm.max_tail_bound;
            json rows = json::array();
            for (std::size_t r = 0; r < tm.dim(); ++r) {
                json row = json::array();
                for (std::size_t c = 0; c < tm.dim(); ++c)
                    row.push_back(tm.at(r, c));
                rows.push_back(row);
            }
            report["entries"] = rows;
            report["basis"] = tm.basis;
            report["status"] = "ok";
            report["failures"] = json::array();
            return {report, 0};
        }

        if (cfg.command == "transfer-commute") {
            if (auto e = require_float("lattice sums")) return *e;
            if (cfg.pair1.size() != 2 || cfg.pair2.size() != 2)
                return detail::usage_error(report,
                                           "--pairs needs v1,w1,v2,w2");
            LatticeSpec spec;
            spec.M = cfg.M;
            spec.N = cfg.N;
            spec.q = cfg.q;
            spec.mu = cfg.mu;
            spec.cutoff = cfg.cutoff;
            spec.tol = cfg.tol;
            std::vector<int> caps = cfg.cutoffs;
            if (caps.empty()) caps = {1, 2, 3};
            const CommutativityReport r = verify_commutativity(
                spec, cfg.sector, {cfg.pair1[0], cfg.pair1[1]},
                {cfg.pair2[0], cfg.pair2[1]}, caps);
            json steps = json::array();
            for (const auto& s : r.steps)
                steps.push_back(json{{"jk_cap", s.jk_cap},
                                     {"residual", s.residual},
                                     {"tail_bound", s.tail_bound}});
            report["steps"] = steps;
            report["below_bound"] = r.below_bound;
            report["non_increasing"] = r.non_increasing;
            report["status"] = r.ok() ? "ok" : "identity_violated";
            report["failures"] = json::array();
            if (!r.ok())
                report["failures"].push_back(
                    "commutator residual above truncation bound");
            return {report, r.ok() ? 0 : 1};
        }

        if (cfg.command == "duality") {
            if (auto e = require_float("lattice sums")) return *e;
            LatticeSpec spec;
            spec.M = cfg.M;
            spec.N = cfg.N;
            spec.q = cfg.q;
            spec.v = cfg.v;
            spec.w = cfg.lattice_w;
            spec.mu = cfg.mu;
            spec.mu1 = spec.mu2 = spec.mu3 = cfg.mu;
            spec.cutoff = cfg.cutoff;
            const DualityReport r = verify_rank_size_duality(
                spec, cfg.max_sector, cfg.max_power, cfg.tol);
            json blocks = json::array();
            for (const auto& b : r.blocks)
                blocks.push_back(json{{"sector", b.sector},
                                      {"power", b.power},
                                      {"variable", std::string(1, b.variable)},
                                      {"scalar", b.scalar},
                                      {"max_rel_dev", b.max_rel_dev}});
            report["blocks"] = blocks;
            report["status"] = r.ok ? "ok" : "identity_violated";
            report["failures"] = json::array();
            if (!r.ok) report["failures"].push_back("duality blocks diverge");
            return {report, r.ok ? 0 : 1};
        }

        return detail::usage_error(report,
                                   "unknown command '" + cfg.command + "'");
    } catch (const DivergenceError& e) {
        report["status"] = "convergence_not_reached";
        report["error"] = e.what();
        return {report, 3};
    } catch (const Error& e) {
        report["status"] = "error";
        report["error"] = e.what();
        return {report, 1};
    }
}

// Optional on-disk memo of the Q polynomials, controlled by an environment
// variable holding a directory path.
inline std::string qpoly_cache_file(const std::string& dir) {
    return dir + "/qpoly_cache.json";
}

inline void load_qpoly_cache_from_env(const char* env = "TETRA3D_CACHE_DIR") {
    const char* dir = std::getenv(env);
    if (!dir) return;
    std::ifstream in(qpoly_cache_file(dir));
    if (!in) return;
    try {
        json j;
        in >> j;
        q_poly_cache().merge_json(j);
    } catch (...) {
        // unreadable cache is ignored, it will be rewritten
    }
}

inline void save_qpoly_cache_to_env(const char* env = "TETRA3D_CACHE_DIR") {
    const char* dir = std::getenv(env);
    if (!dir) return;
    std::ofstream out(qpoly_cache_file(dir));
    if (out) out << q_poly_cache().to_json().dump();
}

} // namespace tetra3d
