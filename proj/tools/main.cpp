// Command-line frontend for the time-series congruence toolkit.
//
// Reports go to stdout as JSON (or CSV for table-shaped output);
// diagnostics go to stderr. Exit codes: 0 success, 2 input error,
// 3 capability error, 4 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tscong/bench.hpp"
#include "tscong/congruence.hpp"
#include "tscong/gen.hpp"
#include "tscong/io.hpp"
#include "tscong/parallel.hpp"
#include "tscong/reduction.hpp"
#include "tscong/structure.hpp"
#include "tscong/time_series.hpp"

namespace {

using namespace tscong;

StructureNorm parse_norm(const std::string& text) {
    if (text == "max-column") return StructureNorm::max_column();
    try {
        return StructureNorm::p_norm(std::stod(text));
    } catch (const std::invalid_argument&) {
        throw InputError("--norm must be 'max-column' or a p value >= 1");
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct DistanceOptions {
    std::string file_a, file_b;
    std::string measure = "series";
    std::string mode = "iterative";
    std::string norm = "max-column";
    double p = 1.0;
    bool with_translation = false;
    SolverConfig cfg;
};

void run_distance(const DistanceOptions& opt) {
    const TimeSeries a = read_series_csv(std::filesystem::path(opt.file_a));
    const TimeSeries b = read_series_csv(std::filesystem::path(opt.file_b));

    DistanceReport report;
    report.params["a"] = opt.file_a;
    report.params["b"] = opt.file_b;

    if (opt.measure == "series") {
        const WindowedValue w = series_distance(a, b, opt.p);
        report.measure = Measure::Series;
        report.value = w.value;
        report.offset = w.offset;
        report.certified = true;
        report.params["p"] = opt.p;
    } else if (opt.measure == "delta" || opt.measure == "reduced-delta") {
        const StructureNorm norm = parse_norm(opt.norm);
        const bool reduced = opt.measure == "reduced-delta";
        const WindowedValue w = reduced ? reduced_delta_distance(a, b, norm)
                                        : delta_distance(a, b, norm);
        report.measure = reduced ? Measure::ReducedDelta : Measure::Delta;
        report.value = w.value;
        report.offset = w.offset;
        report.certified = true;
        report.params["norm"] = opt.norm;
    } else if (opt.measure == "congruence") {
        CongruenceResult res{0.0, RigidTransform::identity(a.dim()), SolverMode::Iterative,
                             false, 0.0};
        if (opt.mode == "iterative") {
            res = congruence_distance_upper(a, b, opt.p, opt.cfg);
            report.measure = Measure::CongruenceUpper;
            report.params["p"] = opt.p;
            report.params["restarts"] = opt.cfg.restarts;
            report.params["max_iters"] = opt.cfg.max_iters;
            report.params["seed"] = opt.cfg.seed;
        } else if (opt.mode == "boolean") {
            if (opt.p != 1.0) throw InputError("boolean mode computes d_1 only; use --p 1");
            res = congruence_distance_boolean(a, b, opt.with_translation, opt.cfg);
            report.measure = Measure::CongruenceBoolean;
            report.params["with_translation"] = opt.with_translation;
        } else if (opt.mode == "grid-k2") {
            res = congruence_distance_grid_k2(a, b, opt.cfg, opt.p);
            report.measure = Measure::CongruenceGrid2;
            report.params["p"] = opt.p;
            report.params["grid_resolution"] = opt.cfg.grid_resolution;
            report.params["grid_error_bound"] = res.error_bound;
        } else if (opt.mode == "signed-permutations") {
            if (opt.p != 1.0)
                throw InputError("signed-permutations mode computes d_1 only; use --p 1");
            res = signed_permutation_search(a, b);
            report.measure = Measure::CongruenceSignedPerm;
        } else {
            throw InputError("unknown solver mode '" + opt.mode + "'");
        }
        report.value = res.value;
        report.witness = res.transform;
        report.certified = res.certified_exact;
    } else {
        throw InputError("unknown measure '" + opt.measure + "'");
    }
    write_report_json(report, std::cout);
}

void run_structure(const std::string& file, bool reduced, const std::string& out_path) {
    const TimeSeries t = read_series_csv(std::filesystem::path(file));
    const StructureMatrix m = reduced ? reduced_structure(t) : structure(t);

    std::ostringstream text;
    for (std::size_t i = 0; i < m.row_count(); ++i) {
        const auto& row = m.row(i);
        for (std::size_t slot = 0; slot < row.size(); ++slot) {
            if (slot) text << ',';
            text << detail::format_double(row[slot]);
        }
        text << '\n';
    }
    if (out_path.empty()) {
        std::cout << text.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw InputError("cannot open " + out_path + " for writing");
        out << text.str();
    }
}

void run_reduce(const std::string& cnf_path, const std::string& prefix) {
    const CnfFormula formula = parse_dimacs(read_text_file(cnf_path));
    const ReductionInstance inst = build_reduction(formula);

    write_series_csv(inst.s_series, std::filesystem::path(prefix + "_S.csv"));
    write_series_csv(inst.t_series, std::filesystem::path(prefix + "_T.csv"));

    nlohmann::ordered_json meta;
    meta["k"] = formula.num_vars;
    meta["m"] = formula.clauses.size();
    meta["target"] = inst.target;
    meta["half_target"] = inst.half_target;
    std::ofstream out(prefix + "_meta.json");
    if (!out) throw InputError("cannot open " + prefix + "_meta.json for writing");
    out << meta.dump(2) << '\n';
    std::cerr << "wrote " << prefix << "_S.csv, " << prefix << "_T.csv, " << prefix
              << "_meta.json\n";
}

void run_verify_reduction(const std::string& cnf_path) {
    const CnfFormula formula = parse_dimacs(read_text_file(cnf_path));
    const ReductionInstance inst = build_reduction(formula);
    const ReductionReport report = verify_reduction(inst);

    nlohmann::ordered_json j;
    j["k"] = formula.num_vars;
    j["m"] = formula.clauses.size();
    j["boolean_min"] = report.boolean_min;
    j["half_target"] = report.half_target;
    j["target"] = report.target;
    j["match"] = report.match;
    j["satisfiable"] = report.satisfiable;
    if (report.model) {
        std::vector<int> bits;
        for (bool b : *report.model) bits.push_back(b ? 1 : 0);
        j["model"] = bits;
    } else {
        j["model"] = nullptr;
    }
    j["witness_signs"] = report.witness_signs;
    j["mirrored_value"] = report.mirrored_value;
    std::cout << j.dump(2) << '\n';
}

struct ExperimentOptions {
    double eta = 2.0;
    int explosions = 1;
    std::string corpus_kind = "random-walk";
    std::size_t count = 100;
    std::size_t length = 64;
    std::size_t dim = 32;
    std::uint64_t seed = 0;
    std::string out;
};

CorpusKind parse_corpus_kind(const std::string& text) {
    if (text == "random-walk") return CorpusKind::RandomWalk;
    if (text == "smooth") return CorpusKind::Smooth;
    if (text == "loop") return CorpusKind::Loop;
    throw InputError("corpus kind must be random-walk, smooth, or loop");
}

void run_experiment(const ExperimentOptions& opt) {
    const auto corpus = synth_corpus(opt.count, static_cast<Eigen::Index>(opt.length),
                                     static_cast<Eigen::Index>(opt.dim),
                                     parse_corpus_kind(opt.corpus_kind), opt.seed);
    GenParams params{opt.eta, opt.explosions, opt.seed};
    const RatioExperimentResult result = ratio_experiment(corpus, params);

    std::ostringstream csv;
    csv << "series_id,d1,delta_m,reduced_delta_m,e_delta,e_reduced\n";
    for (const auto& rec : result.records) {
        csv << rec.series_id << ',' << detail::format_double(rec.d1) << ','
            << detail::format_double(rec.delta_m) << ','
            << detail::format_double(rec.reduced_delta_m) << ','
            << detail::format_double(rec.e_delta) << ','
            << detail::format_double(rec.e_reduced) << '\n';
    }
    if (opt.out.empty()) {
        std::cerr << csv.str();
    } else {
        std::ofstream out(opt.out);
        if (!out) throw InputError("cannot open " + opt.out + " for writing");
        out << csv.str();
    }

    nlohmann::ordered_json summary;
    summary["count"] = result.records.size();
    summary["excluded"] = result.excluded;
    if (result.records.empty()) {
        summary["mean_e_delta"] = nullptr;
        summary["mean_e_reduced"] = nullptr;
    } else {
        summary["mean_e_delta"] = result.mean_e_delta;
        summary["mean_e_reduced"] = result.mean_e_reduced;
    }
    std::cout << summary.dump(2) << '\n';
}

struct BenchOptions {
    std::vector<std::size_t> lengths{256, 512, 1024, 2048};
    std::size_t dim = 8;
    std::string measure = "delta";
    int repeats = 5;
    std::uint64_t seed = 0;
};

void run_bench_cmd(const BenchOptions& opt) {
    BenchMeasure measure;
    if (opt.measure == "series") {
        measure = BenchMeasure::Series;
    } else if (opt.measure == "delta") {
        measure = BenchMeasure::Delta;
    } else if (opt.measure == "reduced-delta") {
        measure = BenchMeasure::ReducedDelta;
    } else {
        throw InputError("bench measure must be series, delta, or reduced-delta");
    }
    const BenchResult result = run_bench(opt.lengths, static_cast<Eigen::Index>(opt.dim),
                                         measure, opt.repeats, opt.seed);
    std::cout << "length,median_seconds\n";
    for (const auto& row : result.rows)
        std::cout << row.length << ',' << detail::format_double(row.median_seconds) << '\n';
    std::cout << "exponent," << detail::format_double(result.fitted_exponent) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"congruence-style distances for high dimensional time series"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "cap on worker threads (default: TSCONG_THREADS or all cores)");

    DistanceOptions dist;
    auto* cmd_distance = app.add_subcommand("distance", "distance between two series CSV files");
    cmd_distance->add_option("a", dist.file_a, "first series CSV")->required();
    cmd_distance->add_option("b", dist.file_b, "second series CSV")->required();
    cmd_distance->add_option("--measure", dist.measure,
                             "series | delta | reduced-delta | congruence");
    cmd_distance->add_option("--p", dist.p, "series norm exponent (p >= 1)");
    cmd_distance->add_option("--norm", dist.norm, "max-column or a p value (delta measures)");
    cmd_distance->add_option("--mode", dist.mode,
                             "iterative | boolean | grid-k2 | signed-permutations");
    cmd_distance->add_flag("--with-translation", dist.with_translation,
                           "optimize translation per boolean candidate");
    cmd_distance->add_option("--restarts", dist.cfg.restarts, "iterative solver restarts");
    cmd_distance->add_option("--max-iters", dist.cfg.max_iters, "iteration cap");
    cmd_distance->add_option("--grid-resolution", dist.cfg.grid_resolution,
                             "grid step in radians");
    cmd_distance->add_option("--weiszfeld-tol", dist.cfg.weiszfeld_tol, "convergence tolerance");
    cmd_distance->add_option("--irls-eps", dist.cfg.irls_eps, "weight floor");
    cmd_distance->add_option("--seed", dist.cfg.seed, "RNG seed for random restarts");

    std::string structure_file, structure_out;
    bool structure_reduced = false;
    auto* cmd_structure = app.add_subcommand("structure", "dump a series structure as CSV");
    cmd_structure->add_option("series", structure_file, "series CSV")->required();
    cmd_structure->add_flag("--reduced", structure_reduced, "power-of-two lags only");
    cmd_structure->add_option("--out", structure_out, "output path (default: stdout)");

    std::string reduce_cnf, reduce_prefix;
    auto* cmd_reduce = app.add_subcommand("reduce", "embed a 3-cnf formula as a series pair");
    cmd_reduce->add_option("cnf", reduce_cnf, "DIMACS CNF file")->required();
    cmd_reduce->add_option("--out-prefix", reduce_prefix, "output file prefix")->required();

    std::string verify_cnf;
    auto* cmd_verify = app.add_subcommand("verify-reduction",
                                          "verify the embedding of a 3-cnf formula numerically");
    cmd_verify->add_option("cnf", verify_cnf, "DIMACS CNF file")->required();

    ExperimentOptions exp;
    auto* cmd_experiment = app.add_subcommand("experiment", "perturbation ratio experiment");
    cmd_experiment->add_option("--eta", exp.eta, "scale bound (> 1)");
    cmd_experiment->add_option("--explosions", exp.explosions, "explosion rounds (>= 1)");
    cmd_experiment->add_option("--corpus-kind", exp.corpus_kind, "random-walk | smooth | loop");
    cmd_experiment->add_option("--count", exp.count, "corpus size");
    cmd_experiment->add_option("--length", exp.length, "series length");
    cmd_experiment->add_option("--dim", exp.dim, "state dimension");
    cmd_experiment->add_option("--seed", exp.seed, "RNG seed");
    cmd_experiment->add_option("--out", exp.out, "records CSV path (default: stderr)");

    BenchOptions bench;
    auto* cmd_bench = app.add_subcommand("bench", "timing table across series lengths");
    cmd_bench->add_option("--lengths", bench.lengths, "comma separated lengths")
        ->delimiter(',');
    cmd_bench->add_option("--dim", bench.dim, "state dimension");
    cmd_bench->add_option("--measure", bench.measure, "series | delta | reduced-delta");
    cmd_bench->add_option("--repeats", bench.repeats, "samples per length");
    cmd_bench->add_option("--seed", bench.seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (threads > 0) set_thread_cap(threads);
        if (cmd_distance->parsed()) run_distance(dist);
        if (cmd_structure->parsed()) run_structure(structure_file, structure_reduced, structure_out);
        if (cmd_reduce->parsed()) run_reduce(reduce_cnf, reduce_prefix);
        if (cmd_verify->parsed()) run_verify_reduction(verify_cnf);
        if (cmd_experiment->parsed()) run_experiment(exp);
        if (cmd_bench->parsed()) run_bench_cmd(bench);
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CapabilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
