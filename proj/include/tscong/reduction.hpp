#pragma once

// Embedding of one-in-three satisfiability into time-series congruence,
// plus the numeric verifier for the embedded instances.
//
// Each 3-clause over variables I = {i1 < i2 < i3} becomes a 9-state
// gadget pair. The anchor part forces any minimizing orthogonal matrix
// to act on the clause dimensions as axis sign flips; the clause part
// encodes the three "exactly this literal true" patterns, reached with
// summed distance 36 + 4*sqrt(2) exactly when the sign flips spell a
// one-in-three model of the clause. Gadgets concatenate per clause, and
// appending the negated copy of each series removes any advantage a
// translation could give, doubling the optimal value.
//
// Sign matrices (diagonal +-1) correspond to assignments: dimension i
// kept positive means variable i is true.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tscong/congruence.hpp"
#include "tscong/errors.hpp"
#include "tscong/time_series.hpp"

namespace tscong {

struct CnfClause {
    // Signed 1-based variable indices, sorted by variable; the three
    // variables are distinct.
    std::array<int, 3> literals{};

    std::array<int, 3> variables() const {
        return {std::abs(literals[0]), std::abs(literals[1]), std::abs(literals[2])};
    }
};

// Normalizes literal order and enforces the per-clause invariants.
inline CnfClause make_clause(std::array<int, 3> literals, int num_vars) {
    std::sort(literals.begin(), literals.end(),
              [](int a, int b) { return std::abs(a) < std::abs(b); });
    for (int lit : literals) {
        if (lit == 0) throw InputError("clause literal must be nonzero");
        if (std::abs(lit) > num_vars)
            throw InputError("clause references variable " + std::to_string(std::abs(lit)) +
                             " beyond the declared " + std::to_string(num_vars));
    }
    if (std::abs(literals[0]) == std::abs(literals[1]) ||
        std::abs(literals[1]) == std::abs(literals[2]))
        throw InputError("clause variables must be distinct");
    return CnfClause{literals};
}

struct CnfFormula {
    int num_vars = 0;
    std::vector<CnfClause> clauses;

    void validate() const {
        if (num_vars < 1) throw InputError("formula must declare at least one variable");
        if (clauses.empty()) throw InputError("formula must contain at least one clause");
        for (const auto& c : clauses) make_clause(c.literals, num_vars);
    }

    std::string to_dimacs() const {
        std::ostringstream out;
        out << "p cnf " << num_vars << ' ' << clauses.size() << '\n';
        for (const auto& c : clauses)
            out << c.literals[0] << ' ' << c.literals[1] << ' ' << c.literals[2] << " 0\n";
        return out.str();
    }
};

// DIMACS CNF reader restricted to 3-clauses with distinct variables.
// Comment lines start with 'c'; the "p cnf <vars> <clauses>" header is
// required and the clause count must match.
inline CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    CnfFormula formula;
    bool have_header = false;
    std::size_t declared_clauses = 0;
    std::vector<int> pending;

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::string first;
        if (!(tokens >> first)) continue;  // blank line
        if (first == "c" || first[0] == 'c') continue;

        if (!have_header) {
            if (first != "p") throw ParseError("expected 'p cnf <vars> <clauses>' header", line_no);
            std::string kind;
            long vars = 0, clauses = 0;
            if (!(tokens >> kind >> vars >> clauses) || kind != "cnf" || vars < 1 || clauses < 1)
                throw ParseError("malformed DIMACS header", line_no);
            std::string trailing;
            if (tokens >> trailing) throw ParseError("malformed DIMACS header", line_no);
            formula.num_vars = static_cast<int>(vars);
            declared_clauses = static_cast<std::size_t>(clauses);
            have_header = true;
            continue;
        }

        std::istringstream body(line);
        int lit = 0;
        while (body >> lit) {
            if (lit == 0) {
                if (pending.size() != 3)
                    throw ParseError("clause must contain exactly 3 literals, found " +
                                         std::to_string(pending.size()),
                                     line_no);
                try {
                    formula.clauses.push_back(
                        make_clause({pending[0], pending[1], pending[2]}, formula.num_vars));
                } catch (const InputError& e) {
                    throw ParseError(e.what(), line_no);
                }
                pending.clear();
            } else {
                pending.push_back(lit);
                if (pending.size() > 3)
                    throw ParseError("clause must contain exactly 3 literals", line_no);
            }
        }
        if (!body.eof()) throw ParseError("unexpected token in clause data", line_no);
    }

    if (!have_header) throw ParseError("missing DIMACS header", line_no == 0 ? 1 : line_no);
    if (!pending.empty()) throw ParseError("unterminated clause at end of input", line_no);
    if (formula.clauses.size() != declared_clauses)
        throw ParseError("header declares " + std::to_string(declared_clauses) +
                             " clauses but " + std::to_string(formula.clauses.size()) +
                             " were given",
                         line_no);
    return formula;
}

// Per-clause optimum of the gadget distance over orthogonal matrices.
inline double clause_optimum() { return 36.0 + 4.0 * std::sqrt(2.0); }

// Builds the 9-state gadget pair of one clause embedded in R^k.
// The first six states are the anchor part (+-6 e_i versus 6 e_i per
// clause variable in increasing order), the last three the clause part
// (the three one-in-three patterns versus e_I three times).
inline std::pair<TimeSeries, TimeSeries> embed_clause(const CnfClause& clause, int k) {
    if (k < 1) throw InputError("embedding dimension must be >= 1");
    const CnfClause checked = make_clause(clause.literals, k);

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(9, k);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(9, k);

    Eigen::VectorXd e_union = Eigen::VectorXd::Zero(k);
    std::array<Eigen::VectorXd, 3> literal_vecs;
    for (int a = 0; a < 3; ++a) {
        const int lit = checked.literals[static_cast<std::size_t>(a)];
        const int var = std::abs(lit) - 1;
        literal_vecs[static_cast<std::size_t>(a)] = Eigen::VectorXd::Zero(k);
        literal_vecs[static_cast<std::size_t>(a)](var) = lit > 0 ? 1.0 : -1.0;
        e_union(var) += 1.0;

        s(2 * a, var) = 6.0;
        s(2 * a + 1, var) = -6.0;
        t(2 * a, var) = 6.0;
        t(2 * a + 1, var) = 6.0;
    }
    for (int a = 0; a < 3; ++a) {
        Eigen::VectorXd gamma = literal_vecs[static_cast<std::size_t>(a)];
        for (int b = 0; b < 3; ++b)
            if (b != a) gamma -= literal_vecs[static_cast<std::size_t>(b)];
        s.row(6 + a) = gamma.transpose();
        t.row(6 + a) = e_union.transpose();
    }
    return {TimeSeries(std::move(s)), TimeSeries(std::move(t))};
}

struct ReductionInstance {
    CnfFormula formula;
    TimeSeries s_series;  // clause gadgets then their negated copies, 18m states
    TimeSeries t_series;
    double target = 0.0;       // m * (72 + 8*sqrt(2)), mirrored instance
    double half_target = 0.0;  // m * (36 + 4*sqrt(2)), unmirrored half

    Eigen::Index clause_count() const { return static_cast<Eigen::Index>(formula.clauses.size()); }
    TimeSeries s_half() const { return subseries(s_series, 0, s_series.size() / 2); }
    TimeSeries t_half() const { return subseries(t_series, 0, t_series.size() / 2); }
};

inline ReductionInstance build_reduction(const CnfFormula& formula) {
    formula.validate();
    const int k = formula.num_vars;
    const Eigen::Index m = static_cast<Eigen::Index>(formula.clauses.size());

    Eigen::MatrixXd s(18 * m, k), t(18 * m, k);
    for (Eigen::Index j = 0; j < m; ++j) {
        auto [sg, tg] = embed_clause(formula.clauses[static_cast<std::size_t>(j)], k);
        s.middleRows(9 * j, 9) = sg.states();
        t.middleRows(9 * j, 9) = tg.states();
    }
    s.bottomRows(9 * m) = -s.topRows(9 * m);
    t.bottomRows(9 * m) = -t.topRows(9 * m);

    const double per_clause = clause_optimum();
    return ReductionInstance{formula, TimeSeries(std::move(s)), TimeSeries(std::move(t)),
                             2.0 * static_cast<double>(m) * per_clause,
                             static_cast<double>(m) * per_clause};
}

struct OneInThreeResult {
    bool satisfiable = false;
    // Assignment per variable, present iff satisfiable; the first model
    // in mask order with variable 1 as the least significant bit.
    std::optional<std::vector<bool>> model;
};

// Exhaustive search for an assignment satisfying exactly one literal in
// every clause.
inline OneInThreeResult brute_force_one_in_three(const CnfFormula& formula, int k_max = 24) {
    formula.validate();
    const int k = formula.num_vars;
    if (k > k_max)
        throw CapabilityError("one-in-three enumeration is capped at " + std::to_string(k_max) +
                              " variables");
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
        bool ok = true;
        for (const auto& clause : formula.clauses) {
            int satisfied = 0;
            for (int lit : clause.literals) {
                const bool value = (mask >> (std::abs(lit) - 1)) & 1;
                if (value == (lit > 0)) ++satisfied;
            }
            if (satisfied != 1) {
                ok = false;
                break;
            }
        }
        if (ok) {
            std::vector<bool> model(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) model[static_cast<std::size_t>(i)] = (mask >> i) & 1;
            return {true, std::move(model)};
        }
    }
    return {false, std::nullopt};
}

// Sign matrix of an assignment: dimension i stays positive iff variable
// i+1 is true.
inline Eigen::MatrixXd assignment_to_matrix(const std::vector<bool>& model) {
    const Eigen::Index k = static_cast<Eigen::Index>(model.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        if (!model[static_cast<std::size_t>(i)]) m(i, i) = -1.0;
    return m;
}

inline std::vector<bool> matrix_to_assignment(const Eigen::MatrixXd& m) {
    std::vector<bool> model(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) model[static_cast<std::size_t>(i)] = m(i, i) > 0;
    return model;
}

struct ReductionReport {
    double boolean_min = 0.0;  // min over sign matrices of d_1 on the unmirrored halves
    double half_target = 0.0;
    double target = 0.0;
    bool match = false;  // boolean_min equals half_target within tolerance
    bool satisfiable = false;
    std::optional<std::vector<bool>> model;
    std::vector<int> witness_signs;  // diagonal of the minimizing sign matrix
    double mirrored_value = 0.0;     // d_1 on the mirrored instance under the same witness
};

// Certifies the instance numerically: the sign-matrix minimum B must
// stay above the per-clause floor, hit it exactly iff the formula has a
// one-in-three model, and double on the mirrored instance. Any breach
// throws VerificationError carrying the offending formula.
inline ReductionReport verify_reduction(const ReductionInstance& inst, double tol = 1e-6) {
    if (inst.formula.num_vars > 20)
        throw CapabilityError("verification enumerates sign matrices; capped at 20 variables");

    const TimeSeries s_half = inst.s_half();
    const TimeSeries t_half = inst.t_half();
    const CongruenceResult bres = congruence_distance_boolean(s_half, t_half, false);
    const double b = bres.value;

    auto fail = [&](const std::string& what) {
        throw VerificationError(what + "\nformula:\n" + inst.formula.to_dimacs());
    };

    if (b < inst.half_target - tol) fail("sign-matrix minimum fell below the per-clause floor");

    const bool match = std::abs(b - inst.half_target) <= tol;
    const OneInThreeResult sat = brute_force_one_in_three(inst.formula);
    if (match != sat.satisfiable)
        fail(match ? "minimum reaches the floor but the formula has no one-in-three model"
                   : "formula has a one-in-three model but the minimum misses the floor");

    const double mirrored =
        transformed_series_distance(inst.s_series, inst.t_series, bres.transform.matrix,
                                    Eigen::VectorXd::Zero(inst.formula.num_vars), 1.0);
    if (std::abs(mirrored - 2.0 * b) > 1e-9 * (1.0 + 2.0 * b))
        fail("mirrored instance value does not double the unmirrored minimum");

    std::vector<int> signs(static_cast<std::size_t>(inst.formula.num_vars));
    for (Eigen::Index i = 0; i < bres.transform.matrix.rows(); ++i)
        signs[static_cast<std::size_t>(i)] = bres.transform.matrix(i, i) > 0 ? 1 : -1;

    return ReductionReport{b,       inst.half_target, inst.target, match,
                           sat.satisfiable, sat.model,   std::move(signs), mirrored};
}

}  // namespace tscong
