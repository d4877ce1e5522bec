// Command-line front end: element queries, the verification suites, block
// and partition computations, machine-readable JSON reports and CSV spectra.

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <fstream>
#include <iostream>

#include "tetra3d/runner.hpp"

using namespace tetra3d;

namespace {

void emit(const RunResult& result, const std::string& out_path) {
    const std::string text = result.report.dump(2);
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(out_path);
        out << text << "\n";
    }
}

int write_spectra_csv(const RunConfig& cfg, const std::string& path) {
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
    const auto d = static_cast<Eigen::Index>(tm.dim());
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = tm.at(r, c);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot open " << path << "\n";
        return 2;
    }
    out << "sector,index,re,im\n";
    std::vector<std::pair<double, double>> ev;
    for (Eigen::Index t = 0; t < d; ++t)
        ev.emplace_back(solver.eigenvalues()[t].real(),
                        solver.eigenvalues()[t].imag());
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second > b.second;
    });
    char line[128];
    for (std::size_t t = 0; t < ev.size(); ++t) {
        std::snprintf(line, sizeof(line), "%d,%zu,%.17g,%.17g\n", cfg.sector, t,
                      ev[t].first, ev[t].second);
        out << line;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tetra3d: positive 3D vertex weights, identity verification "
                 "suites and layer-to-layer transfer matrices"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string mode = "";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--mode", mode, "exact | float");
        sub->add_option("--tol", cfg.tol, "relative tolerance");
        sub->add_option("--seed", cfg.seed, "seed for randomized sweeps");
        sub->add_option("--threads", cfg.threads, "worker threads");
        sub->add_option("--out", cfg.out_path, "write the JSON report here");
    };

    std::string idx_csv;
    auto* element = app.add_subcommand("element", "one exact matrix element");
    element->add_option("--idx", idx_csv, "n1,n2,n3,n1',n2',n3'")->required();
    element->add_option("--q", cfg.q, "evaluate numerically at this q");
    add_common(element);

    auto* qpoly = app.add_subcommand("qpoly", "one Q polynomial");
    qpoly->add_option("--n", cfg.n)->required();
    qpoly->add_option("--a1", cfg.a1)->required();
    qpoly->add_option("--a2", cfg.a2)->required();
    qpoly->add_option("--a3", cfg.a3)->required();
    qpoly->add_flag("--hypergeometric", cfg.hypergeometric,
                    "also run the 2phi1 route and compare");
    add_common(qpoly);

    auto* verify = app.add_subcommand("verify", "identity verification suites");
    verify->require_subcommand(1);
    auto* tetra = verify->add_subcommand("tetra", "tetrahedron equation");
    tetra->add_option("--max-index", cfg.max_index);
    tetra->add_flag("--dressed", cfg.dressed, "dressed weights (float mode)");
    tetra->add_option("--q", cfg.q);
    tetra->add_option("--sample", cfg.sample_count,
                      "extra random externals at --sample-max-index");
    tetra->add_option("--sample-max-index", cfg.sample_max_index);
    add_common(tetra);
    auto* map = verify->add_subcommand("map", "q-oscillator intertwining");
    map->add_option("--cutoff", cfg.cutoff);
    map->add_flag("--k3-cubed", cfg.k3_cubed,
                  "literal reading of the k2^2 relation (negative control)");
    add_common(map);
    auto* symmetry = verify->add_subcommand("symmetry", "symmetry relations");
    symmetry->add_option("--max-index", cfg.max_index);
    symmetry->add_option("--which", cfg.symmetry, "p13 | transpose | both");
    add_common(symmetry);
    auto* ybe = verify->add_subcommand("ybe", "composite Yang-Baxter equation");
    ybe->add_option("--n", cfg.chain_n);
    ybe->add_option("--max-charge", cfg.max_charge);
    ybe->add_option("--trials", cfg.trials);
    ybe->add_option("--q", cfg.q);
    add_common(ybe);

    auto* compare = app.add_subcommand("compare", "composite blocks vs oracles");
    compare->require_subcommand(1);
    auto* sl2 = compare->add_subcommand("sl2", "higher-spin sl2 R-matrix");
    sl2->add_option("--max-rep", cfg.max_rep);
    sl2->add_option("--trials", cfg.trials);
    sl2->add_option("--q", cfg.q);
    add_common(sl2);
    auto* sixv = compare->add_subcommand("sixvertex", "six-vertex weights");
    sixv->add_option("--trials", cfg.trials);
    sixv->add_option("--q", cfg.q);
    add_common(sixv);

    auto* block = app.add_subcommand("block", "one composite charge block");
    block->add_option("--n", cfg.chain_n)->required();
    block->add_option("--charge-i", cfg.charge_i)->required();
    block->add_option("--charge-j", cfg.charge_j)->required();
    block->add_option("--w", cfg.w)->required();
    block->add_option("--q", cfg.q)->required();
    add_common(block);

    auto* partition = app.add_subcommand("partition", "partition functions");
    partition->add_option("--L", cfg.L);
    partition->add_option("--M", cfg.M);
    partition->add_option("--N", cfg.N);
    partition->add_option("--q", cfg.q);
    partition->add_option("--u", cfg.u);
    partition->add_option("--v", cfg.v);
    partition->add_option("--w", cfg.lattice_w);
    partition->add_option("--mu", cfg.mu);
    partition->add_option("--cutoff", cfg.cutoff);
    partition->add_option("--sector", cfg.sector);
    partition->add_flag("--full", cfg.full, "sum sectors with u weights");
    partition->add_option("--max-sector", cfg.max_sector);
    add_common(partition);

    auto* transfer = app.add_subcommand("transfer", "layer transfer matrices");
    transfer->require_subcommand(1);
    auto* build = transfer->add_subcommand("build", "build one sector block");
    build->add_option("--M", cfg.M);
    build->add_option("--N", cfg.N);
    build->add_option("--q", cfg.q);
    build->add_option("--v", cfg.v);
    build->add_option("--w", cfg.lattice_w);
    build->add_option("--mu", cfg.mu);
    build->add_option("--cutoff", cfg.cutoff);
    build->add_option("--sector", cfg.sector);
    build->add_option("--csv-spectra", cfg.csv_spectra,
                      "write eigenvalues to this CSV file");
    add_common(build);
    auto* commute = transfer->add_subcommand("commute", "commutator residuals");
    commute->add_option("--M", cfg.M);
    commute->add_option("--N", cfg.N);
    commute->add_option("--q", cfg.q);
    commute->add_option("--mu", cfg.mu);
    commute->add_option("--sector", cfg.sector);
    commute->add_option("--cutoff", cfg.cutoff);
    std::vector<double> pairs;
    commute->add_option("--pairs", pairs, "v1,w1,v2,w2")->delimiter(',');
    std::vector<int> caps;
    commute->add_option("--cutoffs", caps, "j,k caps to scan")->delimiter(',');
    add_common(commute);

    auto* duality = app.add_subcommand("duality", "rank-size duality");
    duality->add_option("--M", cfg.M);
    duality->add_option("--N", cfg.N);
    duality->add_option("--q", cfg.q);
    duality->add_option("--v", cfg.v);
    duality->add_option("--w", cfg.lattice_w);
    duality->add_option("--mu", cfg.mu);
    duality->add_option("--cutoff", cfg.cutoff);
    duality->add_option("--max-sector", cfg.max_sector);
    duality->add_option("--max-power", cfg.max_power);
    add_common(duality);

    CLI11_PARSE(app, argc, argv);

    if (element->parsed()) {
        cfg.command = "element";
        cfg.q_set = element->count("--q") > 0;
        std::stringstream ss(idx_csv);
        std::string part;
        while (std::getline(ss, part, ',')) {
            try {
                cfg.idx.push_back(std::stoi(part));
            } catch (const std::exception&) {
                std::cerr << "--idx expects integers, got '" << part << "'\n";
                return 2;
            }
        }
    } else if (qpoly->parsed()) {
        cfg.command = "qpoly";
    } else if (verify->parsed()) {
        if (tetra->parsed()) cfg.command = "verify-tetra";
        if (map->parsed()) cfg.command = "verify-map";
        if (symmetry->parsed()) cfg.command = "verify-symmetry";
        if (ybe->parsed()) cfg.command = "verify-ybe";
    } else if (compare->parsed()) {
        cfg.command = sl2->parsed() ? "compare-sl2" : "compare-sixvertex";
    } else if (block->parsed()) {
        cfg.command = "block";
    } else if (partition->parsed()) {
        cfg.command = "partition";
    } else if (transfer->parsed()) {
        cfg.command = build->parsed() ? "transfer-build" : "transfer-commute";
        cfg.pair1 = {pairs.size() > 0 ? pairs[0] : 0.3,
                     pairs.size() > 1 ? pairs[1] : 0.2};
        cfg.pair2 = {pairs.size() > 2 ? pairs[2] : 0.1,
                     pairs.size() > 3 ? pairs[3] : 0.4};
        cfg.cutoffs = caps;
    } else if (duality->parsed()) {
        cfg.command = "duality";
    }

    // default mode: exact for the exact-capable suites, float elsewhere
    const bool exact_capable =
        cfg.command == "element" || cfg.command == "qpoly" ||
        (cfg.command == "verify-tetra" && !cfg.dressed) ||
        cfg.command == "verify-map" || cfg.command == "verify-symmetry";
    if (mode.empty()) {
        cfg.mode = exact_capable ? Mode::Exact : Mode::Float;
    } else if (mode == "exact") {
        cfg.mode = Mode::Exact;
    } else if (mode == "float") {
        cfg.mode = Mode::Float;
    } else {
        std::cerr << "unknown --mode '" << mode << "' (use exact or float)\n";
        return 2;
    }
    if (cfg.command == "element" && cfg.q_set && mode.empty())
        cfg.mode = Mode::Float;

    load_qpoly_cache_from_env();
    const RunResult result = run(cfg);
    save_qpoly_cache_to_env();
    emit(result, cfg.out_path);

    if (result.exit_code == 0 && !cfg.csv_spectra.empty())
        return write_spectra_csv(cfg, cfg.csv_spectra);
    return result.exit_code;
}
