// Acceptance suite: runs every catalog scenario and the always-on property
// checks, printing one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails. An optional second argument selects a single criterion.

#include "hbs/admissibility.hpp"
#include "hbs/cohomology.hpp"
#include "hbs/greville_topology.hpp"
#include "hbs/harmonics.hpp"
#include "hbs/scenario.hpp"

#include "../oracles.hpp"

#include <chrono>
#include <cstring>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

using namespace hbs;

namespace
{

std::string g_scenario_dir;

double seconds_since(const std::chrono::steady_clock::time_point& t0)
{
    return std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() - t0)
        .count();
}

Scenario load_scenario(const std::string& name)
{
    return Scenario::load(g_scenario_dir + "/" + name + ".json");
}

struct Criterion
{
    bool pass = true;
    std::ostringstream notes;

    void expect(bool condition, const std::string& what)
    {
        if (!condition)
        {
            pass = false;
            notes << "  FAILED: " << what << "\n";
        }
    }
};

struct ScenarioOutcome
{
    bool check_pass = false;
    std::vector<std::int64_t> spurious;
    std::vector<std::int64_t> dims;
    bool indeterminate = false;
    double check_seconds = 0;
    double cohomology_seconds = 0;
};

ScenarioOutcome run_scenario(const std::string& name)
{
    const Scenario scenario = load_scenario(name);
    ScenarioOutcome outcome;
    {
        const auto t0 = std::chrono::steady_clock::now();
        outcome.check_pass = run_check(scenario).exit_code == 0;
        outcome.check_seconds = seconds_since(t0);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const DomainHierarchy h = scenario.build();
        const HierarchicalBasis basis = kraft_select_all(h);
        const CohomologyReport report = cohomology_dims(h, basis, scenario.rank_options());
        outcome.spurious = report.spurious;
        outcome.dims = report.dims;
        outcome.indeterminate = report.indeterminate;
        outcome.cohomology_seconds = seconds_since(t0);

        // Euler characteristic identity on every cohomology run (criterion 5 vi)
        std::int64_t euler_spaces = 0, euler_dims = 0;
        for (std::size_t j = 0; j < report.dims.size(); ++j)
        {
            const std::int64_t sign = j % 2 == 0 ? 1 : -1;
            euler_spaces += sign * report.space_dims[j];
            euler_dims += sign * report.dims[j];
        }
        if (euler_spaces != euler_dims)
            throw std::runtime_error(name + ": Euler characteristic identity violated");
    }
    return outcome;
}

std::string vec_str(const std::vector<std::int64_t>& v)
{
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        out << (i ? "," : "") << v[i];
    out << ")";
    return out.str();
}

// --- criterion 1: the eight degree-(6,6) diagonal patterns -----------------

bool criterion1()
{
    Criterion crit;
    const std::map<std::string, std::pair<bool, bool>> expected{
        // name -> (exact, admissibility pass)
        {"fig5_a", {true, true}},   {"fig5_b", {true, true}},   {"fig5_c", {true, true}},
        {"fig5_d", {true, true}},   {"fig5_e", {false, false}}, {"fig5_f", {false, false}},
        {"fig5_g", {false, false}}, {"fig5_h", {true, false}},
    };
    for (const auto& [name, flags] : expected)
    {
        const ScenarioOutcome outcome = run_scenario(name);
        bool is_exact = true;
        for (const std::int64_t s : outcome.spurious)
            is_exact = is_exact && s == 0;
        crit.expect(is_exact == flags.first, name + " exactness: got spurious " + vec_str(outcome.spurious));
        crit.expect(outcome.check_pass == flags.second, name + " admissibility verdict");
        crit.expect(!outcome.indeterminate, name + " rank decision indeterminate");
        crit.expect(outcome.cohomology_seconds <= 60.0, name + " cohomology runtime over 60 s");
        std::cout << "  " << name << ": spurious=" << vec_str(outcome.spurious)
                  << " check=" << (outcome.check_pass ? "pass" : "fail") << " t="
                  << outcome.cohomology_seconds << "s\n";
    }
    std::cout << crit.notes.str();
    return crit.pass;
}

// --- criterion 2: the 2D inexact corpus with harmonic extraction -----------

bool criterion2()
{
    Criterion crit;
    const std::map<std::string, std::vector<std::int64_t>> expected{
        {"fig6_a", {0, 0, 1}},
        {"fig6_b", {0, 1, 0}},
        {"fig6_c", {0, 1, 0}},
        {"fig6_d", {0, 2, 0}},
    };
    for (const auto& [name, spurious] : expected)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Scenario scenario = load_scenario(name);
        const DomainHierarchy h = scenario.build();
        const HierarchicalBasis basis = kraft_select_all(h);
        const CohomologyReport report = cohomology_dims(h, basis, scenario.rank_options());
        crit.expect(report.spurious == spurious,
                    name + " spurious counts: got " + vec_str(report.spurious));
        // representative extraction must reproduce every dimension
        for (int j = 0; j <= h.n(); ++j)
        {
            try
            {
                const HarmonicSet set =
                    harmonic_representatives(h, basis, j, scenario.options.tolerance, report.dims[j]);
                crit.expect(static_cast<std::int64_t>(set.representatives.size()) == report.dims[j],
                            name + " representative count at j=" + std::to_string(j));
            }
            catch (const Error& e)
            {
                crit.expect(false, name + " harmonic extraction: " + e.what());
            }
        }
        const double elapsed = seconds_since(t0);
        crit.expect(elapsed <= 30.0, name + " runtime over 30 s");
        std::cout << "  " << name << ": spurious=" << vec_str(report.spurious) << " t=" << elapsed
                  << "s\n";
    }
    std::cout << crit.notes.str();
    return crit.pass;
}

// --- criterion 3: the 3D inexact corpus ------------------------------------

bool criterion3()
{
    Criterion crit;
    const std::vector<std::pair<std::string, std::vector<std::int64_t>>> expected{
        {"fig8_a", {0, 0, 0, 1}}, {"fig8_b", {0, 0, 1, 0}}, {"fig8_c", {0, 0, 1, 0}},
        {"fig8_d", {0, 1, 0, 0}}, {"fig8_e", {0, 2, 0, 0}}, {"fig8_f", {0, 1, 0, 0}},
    };
    for (const auto& [name, spurious] : expected)
    {
        const ScenarioOutcome outcome = run_scenario(name);
        crit.expect(outcome.spurious == spurious,
                    name + " spurious counts: got " + vec_str(outcome.spurious));
        crit.expect(!outcome.indeterminate, name + " rank decision indeterminate");
        crit.expect(outcome.cohomology_seconds <= 600.0, name + " runtime over 10 min");
        std::cout << "  " << name << ": spurious=" << vec_str(outcome.spurious) << " t="
                  << outcome.cohomology_seconds << "s\n";
    }
    std::cout << crit.notes.str();
    return crit.pass;
}

// --- criterion 4: the 3D exact corpora -------------------------------------

bool criterion4()
{
    Criterion crit;
    const std::vector<std::string> supported{"fig9_a", "fig9_b", "fig9_c", "fig9_d", "fig9_e", "fig9_f",
                                             "fig9_g", "fig9_h", "fig9_i", "fig9_j", "fig9_k"};
    const std::vector<std::string> unsupported{"fig10_a", "fig10_b", "fig10_c",
                                               "fig10_d", "fig10_e", "fig10_f"};
    for (const auto& name : supported)
    {
        const ScenarioOutcome outcome = run_scenario(name);
        bool zero = true;
        for (const std::int64_t s : outcome.spurious)
            zero = zero && s == 0;
        crit.expect(zero, name + " spurious: got " + vec_str(outcome.spurious));
        crit.expect(outcome.check_pass, name + " should pass the admissibility check");
        std::cout << "  " << name << ": spurious=" << vec_str(outcome.spurious)
                  << " check=" << (outcome.check_pass ? "pass" : "fail") << " t="
                  << outcome.cohomology_seconds << "s\n";
    }
    for (const auto& name : unsupported)
    {
        const ScenarioOutcome outcome = run_scenario(name);
        bool zero = true;
        for (const std::int64_t s : outcome.spurious)
            zero = zero && s == 0;
        crit.expect(zero, name + " spurious: got " + vec_str(outcome.spurious));
        crit.expect(!outcome.check_pass, name + " should fail the admissibility check");
        std::cout << "  " << name << ": spurious=" << vec_str(outcome.spurious)
                  << " check=" << (outcome.check_pass ? "pass" : "fail") << " t="
                  << outcome.cohomology_seconds << "s\n";
    }
    std::cout << crit.notes.str();
    return crit.pass;
}

// --- criterion 5: always-on property suite ---------------------------------

bool criterion5()
{
    Criterion crit;
    std::mt19937_64 rng(0xACCE97);

    // (i) exact d o d = 0 on 200 randomized spaces
    {
        int count = 0;
        while (count < 200)
        {
            const int n = 1 + static_cast<int>(rng() % 3);
            std::vector<KnotVector> kv;
            for (int k = 0; k < n; ++k)
            {
                const int degree = 1 + static_cast<int>(rng() % 4);
                kv.push_back(oracles::random_knot_vector(rng, degree, 2 + static_cast<int>(rng() % 3),
                                                         degree));
            }
            const LevelSpaces spaces(0, kv);
            for (int j = 0; j + 1 < n; ++j)
            {
                const bool zero =
                    (exterior_derivative_matrix(spaces, j + 1) * exterior_derivative_matrix(spaces, j))
                        .is_zero();
                crit.expect(zero, "d o d != 0");
            }
            ++count;
        }
        std::cout << "  (i) d o d = 0 on 200 spaces\n";
    }

    // (ii) exact prolongation-derivative commutation
    {
        for (int rep = 0; rep < 25; ++rep)
        {
            const int n = 1 + static_cast<int>(rng() % 3);
            std::vector<KnotVector> coarse_kv, fine_kv;
            for (int k = 0; k < n; ++k)
            {
                const int degree = 1 + static_cast<int>(rng() % 3);
                coarse_kv.push_back(oracles::random_knot_vector(rng, degree, 3, degree));
                fine_kv.push_back(dyadic_refinement(coarse_kv.back()));
            }
            const LevelSpaces coarse(0, coarse_kv), fine(1, fine_kv);
            for (int j = 0; j < n; ++j)
            {
                SparseRationalMatrix p_j(fine.form_dim(j), coarse.form_dim(j));
                SparseRationalMatrix p_next(fine.form_dim(j + 1), coarse.form_dim(j + 1));
                for (const auto& c : component_list(n, j))
                    for (const auto& [rc, v] : prolongation_matrix(coarse, fine, c).entries())
                        p_j.set(fine.component_offset(c) + rc.first,
                                coarse.component_offset(c) + rc.second, v);
                for (const auto& c : component_list(n, j + 1))
                    for (const auto& [rc, v] : prolongation_matrix(coarse, fine, c).entries())
                        p_next.set(fine.component_offset(c) + rc.first,
                                   coarse.component_offset(c) + rc.second, v);
                crit.expect(exterior_derivative_matrix(fine, j) * p_j
                                == p_next * exterior_derivative_matrix(coarse, j),
                            "prolongation does not commute with d");
            }
        }
        std::cout << "  (ii) prolongation commutes with d on 25 level pairs\n";
    }

    // (iii)+(iv)+(v)+(vii)+(viii) over a corpus of 100 random hierarchies
    {
        RankOptions exact;
        exact.backend = RankOptions::Backend::Exact;
        exact.exact_cap = std::numeric_limits<std::int64_t>::max();
        RankOptions floating;
        floating.backend = RankOptions::Backend::Floating;

        int subdomains_checked = 0;
        int chain_pairs_checked = 0;
        int rank_matrices_checked = 0;
        for (int rep = 0; rep < 100; ++rep)
        {
            const int n = 1 + static_cast<int>(rng() % 3);
            const int levels = 2 + static_cast<int>(rng() % 2);
            const int max_degree = n == 3 ? 2 : 3;
            const DomainHierarchy h = oracles::random_hierarchy(rng, n, levels, max_degree, n == 3 ? 3 : 4,
                                                                0.3);
            const HierarchicalBasis basis = kraft_select_all(h);

            // (iii) closure
            for (int j = 0; j < n; ++j)
                crit.expect(closure_check(h, basis, j, exact), "closure violated on a random hierarchy");

            // (iv) partition
            for (int l = 0; l < h.max_level(); ++l)
                for (int j = 0; j <= n; ++j)
                    for (const auto& c : component_list(n, j))
                        crit.expect(h.partition_check(l, c), "partition identity violated");

            // (v) subdomain Greville balls, both levels
            for (int l = 0; l < h.max_level() && subdomains_checked < 500; ++l)
            {
                for (int j = 0; j <= n && subdomains_checked < 500; ++j)
                {
                    for (const auto& c : component_list(n, j))
                    {
                        MultiIndex idx(n, 1);
                        for (;;)
                        {
                            if (h.extended_domain_index_valid(l, c, idx) && h.in_itpb(l, c, idx)
                                && subdomains_checked < 500)
                            {
                                const SubdomainRef a = h.omega_subdomain(l, c, idx);
                                for (int s = 0; s <= 1; ++s)
                                    crit.expect(betti(greville_subcomplex(h, l + s, a)).is_ball(n),
                                                "subdomain Greville complex is not a ball");
                                ++subdomains_checked;
                            }
                            int k = n - 1;
                            while (k >= 0)
                            {
                                const int bound = h.level(l).direction(k).num_basis() + c.bits[k] - 1;
                                if (++idx[k] <= bound)
                                    break;
                                idx[k] = 1;
                                --k;
                            }
                            if (k < 0)
                                break;
                        }
                    }
                }
            }

            // (vii) chain search against exhaustive enumeration
            {
                const FormComponent zero{std::vector<int>(n, 0)};
                const auto refined = h.basis_on(0, zero, h.omega(1));
                for (std::size_t a = 0; a < refined.size(); ++a)
                    for (std::size_t b = a + 1; b < refined.size(); ++b)
                    {
                        std::vector<int> delta(n);
                        std::int64_t paths = 1;
                        for (int k = 0; k < n; ++k)
                        {
                            delta[k] = refined[b][k] - refined[a][k];
                            paths *= std::abs(delta[k]) + 1;
                        }
                        if (paths > 256)
                            continue;
                        MultiIndex goal = refined[b];
                        auto supported = [&](const MultiIndex& idx) {
                            return h.level(0).valid_index(zero, idx)
                                   && h.supported_on(0, zero, idx, h.omega(1));
                        };
                        auto walk = [&](auto&& self, const MultiIndex& at) -> bool {
                            if (at == goal)
                                return true;
                            for (int k = 0; k < n; ++k)
                            {
                                if (at[k] == goal[k])
                                    continue;
                                MultiIndex next = at;
                                next[k] += delta[k] > 0 ? 1 : -1;
                                if (supported(next) && self(self, next))
                                    return true;
                            }
                            return false;
                        };
                        const bool enumerated = walk(walk, refined[a]);
                        const bool dp = shortest_chain(h, 0, refined[a], delta).has_value();
                        crit.expect(dp == enumerated, "DP chain search disagrees with enumeration");
                        ++chain_pairs_checked;
                    }
            }

            // (viii) exact vs floating rank agreement up to 2000 columns
            if (rep % 7 == 0)
            {
                const LevelSpaces& fine_level = h.level(h.max_level());
                for (int j = 0; j <= n; ++j)
                {
                    const BasisMatrix p = hierarchical_basis_matrix(h, basis, j);
                    if (p.matrix.cols() > 2000)
                        continue;
                    const auto exact_rank = rank_exact_sparse(p.matrix, 1 << 24);
                    const auto float_rank = rank_floating(p.matrix.cast<double>(), floating);
                    crit.expect(exact_rank == float_rank.rank, "rank backends disagree on P");
                    ++rank_matrices_checked;
                    if (j < n)
                    {
                        const SparseRationalMatrix dp =
                            exterior_derivative_matrix(fine_level, j) * p.matrix;
                        const auto exact_dp_rank = rank_exact_sparse(dp, 1 << 24);
                        const auto float_dp_rank = rank_floating(dp.cast<double>(), floating);
                        crit.expect(exact_dp_rank == float_dp_rank.rank,
                                    "rank backends disagree on D P");
                        ++rank_matrices_checked;
                    }
                }
            }
        }
        crit.expect(subdomains_checked >= 500, "fewer than 500 subdomains sampled");
        crit.expect(chain_pairs_checked >= 200, "fewer than 200 chain pairs enumerated");
        std::cout << "  (iii,iv) closure and partition on 100 hierarchies\n";
        std::cout << "  (v) " << subdomains_checked << " subdomain Greville complexes are balls\n";
        std::cout << "  (vii) " << chain_pairs_checked << " chain pairs vs enumeration\n";
        std::cout << "  (viii) " << rank_matrices_checked << " matrices with matching ranks\n";
    }

    std::cout << crit.notes.str();
    return crit.pass;
}

// --- criterion 6: evaluation and insertion oracles --------------------------

bool criterion6()
{
    Criterion crit;
    std::mt19937_64 rng(0xABCD1234);
    int samples = 0;
    while (samples < 10000)
    {
        const int degree = 1 + static_cast<int>(rng() % 5);
        const KnotVector kv =
            oracles::random_knot_vector(rng, degree, 2 + static_cast<int>(rng() % 5), degree);
        const Rational x = oracles::random_point_off_knots(rng, kv.knots());
        for (int j = 0; j <= 1 && samples < 10000; ++j)
        {
            for (int i = 1; i <= kv.dimension(j) && samples < 10000; ++i)
            {
                const double got = eval_basis(kv, j, i, to_double(x));
                const double expected = to_double(oracles::eval_basis_truncated_power(kv, j, i, x));
                crit.expect(std::abs(got - expected) <= 1e-12, "evaluation oracle mismatch");
                ++samples;
            }
        }
    }
    std::cout << "  evaluation oracle on " << samples << " samples\n";

    int insertion_checks = 0;
    for (int rep = 0; rep < 20; ++rep)
    {
        const int degree = 1 + static_cast<int>(rng() % 4);
        const KnotVector coarse = oracles::random_knot_vector(rng, degree, 3, degree);
        const KnotVector fine = dyadic_refinement(coarse);
        for (int j = 0; j <= 1; ++j)
        {
            const SparseRationalMatrix t = insertion_matrix_1d(coarse, fine, j);
            for (int trial = 0; trial < 5; ++trial)
            {
                const Rational x = oracles::random_point_off_knots(rng, fine.knots());
                for (int i = 1; i <= coarse.dimension(j); ++i)
                {
                    Rational expanded(0);
                    for (int r = 1; r <= fine.dimension(j); ++r)
                    {
                        const Rational w = t.get(r - 1, i - 1);
                        if (w != 0)
                            expanded += w * eval_basis_exact(fine, j, r, x);
                    }
                    crit.expect(expanded == eval_basis_exact(coarse, j, i, x),
                                "insertion identity violated at a rational point");
                    ++insertion_checks;
                }
            }
        }
    }
    std::cout << "  insertion identities exact at " << insertion_checks << " samples\n";
    std::cout << crit.notes.str();
    return crit.pass;
}

// --- criterion 7: unrefined exactness ---------------------------------------

bool criterion7()
{
    Criterion crit;
    std::mt19937_64 rng(0x7777);
    RankOptions exact;
    exact.backend = RankOptions::Backend::Exact;
    exact.exact_cap = std::numeric_limits<std::int64_t>::max();
    for (int rep = 0; rep < 50; ++rep)
    {
        const int n = 1 + static_cast<int>(rng() % 3);
        std::vector<KnotVector> kv;
        for (int k = 0; k < n; ++k)
        {
            const int degree = 1 + static_cast<int>(rng() % (n == 3 ? 2 : 3));
            kv.push_back(oracles::random_knot_vector(rng, degree, 2 + static_cast<int>(rng() % 3), degree));
        }
        std::vector<LevelSpaces> levels;
        levels.emplace_back(0, kv);
        const DomainHierarchy h = DomainHierarchy::build(std::move(levels), {});
        const HierarchicalBasis basis = kraft_select_all(h);
        const CohomologyReport report = cohomology_dims(h, basis, exact);
        for (int j = 0; j < n; ++j)
            crit.expect(report.dims[j] == 0, "single-level complex not exact below the top degree");
        crit.expect(report.dims[n] == 1, "single-level complex top cohomology != 1");
    }
    std::cout << "  50 single-level scenarios exact\n";
    std::cout << crit.notes.str();
    return crit.pass;
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2)
    {
        std::cerr << "usage: acceptance <scenario-dir> [criterion]\n";
        return 2;
    }
    g_scenario_dir = argv[1];
    const int only = argc > 2 ? std::atoi(argv[2]) : 0;

    const std::vector<std::pair<std::string, bool (*)()>> criteria{
        {"criterion 1: degree-(6,6) diagonal pattern catalog", &criterion1},
        {"criterion 2: 2D inexact corpus with harmonics", &criterion2},
        {"criterion 3: 3D inexact corpus", &criterion3},
        {"criterion 4: 3D exact corpora vs the checker", &criterion4},
        {"criterion 5: property suite", &criterion5},
        {"criterion 6: evaluation and insertion oracles", &criterion6},
        {"criterion 7: unrefined exactness", &criterion7},
    };

    bool all_pass = true;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        if (only != 0 && static_cast<int>(i + 1) != only)
            continue;
        std::cout << "[" << criteria[i].first << "]" << std::endl;
        bool pass = false;
        try
        {
            pass = criteria[i].second();
        }
        catch (const std::exception& e)
        {
            std::cout << "  exception: " << e.what() << "\n";
        }
        std::cout << (pass ? "PASS" : "FAIL") << ": " << criteria[i].first << std::endl;
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
