#include "hbs/scenario.hpp"

#include "hbs/error.hpp"
#include "hbs/harmonics.hpp"

#include <fstream>

namespace hbs
{

namespace
{

std::vector<Rational> parse_rational_list(const nlohmann::json& j)
{
    std::vector<Rational> out;
    for (const auto& item : j)
    {
        if (item.is_number_integer())
            out.emplace_back(item.get<long>());
        else if (item.is_string())
            out.push_back(parse_rational(item.get<std::string>()));
        else
            fail(Errc::ParseError, "rationals must be integers or \"a/b\" strings");
    }
    return out;
}

nlohmann::ordered_json rational_list_to_json(const std::vector<Rational>& values)
{
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& v : values)
        out.push_back(to_string(v));
    return out;
}

} // namespace

Scenario Scenario::from_json(const nlohmann::json& j)
{
    Scenario s;
    try
    {
        s.dimension = j.at("dimension").get<int>();
        if (s.dimension < 1)
            fail(Errc::ValidationError, "dimension must be positive");
        s.degrees = j.at("degrees").get<std::vector<int>>();
        if (static_cast<int>(s.degrees.size()) != s.dimension)
            fail(Errc::ValidationError, "degrees must list one entry per direction");

        const auto& base = j.at("base");
        if (base.contains("cells"))
        {
            const auto cells = base.at("cells").get<std::vector<int>>();
            if (static_cast<int>(cells.size()) != s.dimension)
                fail(Errc::ValidationError, "base.cells must list one entry per direction");
            for (int k = 0; k < s.dimension; ++k)
                s.base_knots.push_back(KnotVector::uniform(s.degrees[k], cells[k]).knots());
        }
        else if (base.contains("knots"))
        {
            for (const auto& dir : base.at("knots"))
                s.base_knots.push_back(parse_rational_list(dir));
            if (static_cast<int>(s.base_knots.size()) != s.dimension)
                fail(Errc::ValidationError, "base.knots must list one knot vector per direction");
        }
        else
            fail(Errc::ParseError, "base requires either cells or knots");

        s.levels = j.at("levels").get<int>();
        if (s.levels < 1)
            fail(Errc::ValidationError, "levels must be at least 1");

        if (j.contains("refinement_rule"))
        {
            const auto& rule = j.at("refinement_rule");
            if (rule.is_string() && rule.get<std::string>() == "dyadic")
                s.dyadic = true;
            else if (rule.is_object() && rule.contains("knots"))
            {
                s.dyadic = false;
                for (const auto& level : rule.at("knots"))
                {
                    std::vector<std::vector<Rational>> dirs;
                    for (const auto& dir : level)
                        dirs.push_back(parse_rational_list(dir));
                    s.explicit_knots.push_back(std::move(dirs));
                }
                if (static_cast<int>(s.explicit_knots.size()) != s.levels - 1)
                    fail(Errc::ValidationError, "explicit rule must provide knots for every level above the base");
            }
            else
                fail(Errc::ParseError, "refinement_rule must be \"dyadic\" or {\"knots\": ...}");
        }

        for (const auto& refinement : j.value("refinements", nlohmann::json::array()))
        {
            Refinement r;
            r.level = refinement.at("level").get<int>();
            if (refinement.contains("zero_forms"))
                for (const auto& idx : refinement.at("zero_forms"))
                    r.zero_forms.push_back(idx.get<MultiIndex>());
            if (refinement.contains("boxes"))
            {
                for (const auto& box : refinement.at("boxes"))
                    r.boxes.emplace_back(parse_rational_list(box.at("lo")),
                                         parse_rational_list(box.at("hi")));
            }
            r.allow_assumption2_violation = refinement.value("allow_assumption2_violation", false);
            if (!r.zero_forms.empty() && !r.boxes.empty())
                fail(Errc::ValidationError, "a refinement entry is either zero_forms or boxes, not both");
            s.refinements.push_back(std::move(r));
        }

        if (j.contains("options"))
        {
            const auto& opt = j.at("options");
            s.options.backend = opt.value("backend", s.options.backend);
            if (s.options.backend != "exact" && s.options.backend != "float")
                fail(Errc::ValidationError, "backend must be \"exact\" or \"float\"");
            s.options.tolerance = opt.value("tolerance", s.options.tolerance);
            s.options.gap_threshold = opt.value("gap_threshold", s.options.gap_threshold);
            s.options.exact_cap = opt.value("exact_cap", s.options.exact_cap);
        }
    }
    catch (const Error&)
    {
        throw;
    }
    catch (const nlohmann::json::exception& e)
    {
        fail(Errc::ParseError, e.what());
    }
    return s;
}

Scenario Scenario::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(Errc::IoError, "cannot open scenario file " + path);
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception& e)
    {
        fail(Errc::ParseError, std::string("invalid JSON: ") + e.what());
    }
    return from_json(j);
}

nlohmann::ordered_json Scenario::to_json() const
{
    nlohmann::ordered_json j;
    j["dimension"] = dimension;
    j["degrees"] = degrees;
    {
        nlohmann::ordered_json knots = nlohmann::ordered_json::array();
        for (const auto& dir : base_knots)
            knots.push_back(rational_list_to_json(dir));
        j["base"] = nlohmann::ordered_json{{"knots", knots}};
    }
    j["levels"] = levels;
    if (dyadic)
        j["refinement_rule"] = "dyadic";
    else
    {
        nlohmann::ordered_json per_level = nlohmann::ordered_json::array();
        for (const auto& level : explicit_knots)
        {
            nlohmann::ordered_json dirs = nlohmann::ordered_json::array();
            for (const auto& dir : level)
                dirs.push_back(rational_list_to_json(dir));
            per_level.push_back(dirs);
        }
        j["refinement_rule"] = nlohmann::ordered_json{{"knots", per_level}};
    }
    j["refinements"] = nlohmann::ordered_json::array();
    for (const auto& r : refinements)
    {
        nlohmann::ordered_json entry;
        entry["level"] = r.level;
        if (!r.zero_forms.empty())
            entry["zero_forms"] = r.zero_forms;
        if (!r.boxes.empty())
        {
            nlohmann::ordered_json boxes = nlohmann::ordered_json::array();
            for (const auto& [lo, hi] : r.boxes)
                boxes.push_back(nlohmann::ordered_json{{"lo", rational_list_to_json(lo)},
                                                       {"hi", rational_list_to_json(hi)}});
            entry["boxes"] = boxes;
        }
        if (r.allow_assumption2_violation)
            entry["allow_assumption2_violation"] = true;
        j["refinements"].push_back(entry);
    }
    j["options"] = nlohmann::ordered_json{{"backend", options.backend},
                                          {"tolerance", options.tolerance},
                                          {"gap_threshold", options.gap_threshold},
                                          {"exact_cap", options.exact_cap}};
    return j;
}

DomainHierarchy Scenario::build() const
{
    std::vector<LevelSpaces> level_spaces;
    std::vector<KnotVector> current;
    for (int k = 0; k < dimension; ++k)
        current.push_back(KnotVector::validate(base_knots[k], degrees[k]));
    level_spaces.emplace_back(0, current);
    for (int l = 1; l < levels; ++l)
    {
        std::vector<KnotVector> next;
        if (dyadic)
        {
            for (const auto& kv : current)
                next.push_back(dyadic_refinement(kv));
        }
        else
        {
            for (int k = 0; k < dimension; ++k)
                next.push_back(KnotVector::validate(explicit_knots[l - 1][k], degrees[k]));
        }
        level_spaces.emplace_back(l, next);
        current = std::move(next);
    }

    std::vector<RefinementInput> inputs(levels - 1);
    std::vector<bool> seen(levels - 1, false);
    for (const auto& r : refinements)
    {
        if (r.level < 0 || r.level >= levels - 1)
            fail(Errc::ValidationError, "refinement level out of range");
        if (seen[r.level])
            fail(Errc::ValidationError, "duplicate refinement entry for a level");
        seen[r.level] = true;
        RefinementInput input;
        input.allow_assumption2_violation = r.allow_assumption2_violation;
        if (!r.boxes.empty())
        {
            const LevelSpaces& fine = level_spaces[r.level + 1];
            std::vector<int> dims(dimension);
            for (int k = 0; k < dimension; ++k)
                dims[k] = fine.direction(k).num_cells();
            CellSet cells = CellSet::empty(dims);
            for (const auto& [lo, hi] : r.boxes)
            {
                if (static_cast<int>(lo.size()) != dimension || static_cast<int>(hi.size()) != dimension)
                    fail(Errc::ValidationError, "box corners must list one value per direction");
                std::vector<int> cell_lo(dimension), cell_hi(dimension);
                for (int k = 0; k < dimension; ++k)
                {
                    const auto& unique = fine.direction(k).unique_knots();
                    const auto lo_it = std::lower_bound(unique.begin(), unique.end(), lo[k]);
                    const auto hi_it = std::lower_bound(unique.begin(), unique.end(), hi[k]);
                    if (lo_it == unique.end() || *lo_it != lo[k] || hi_it == unique.end() || *hi_it != hi[k])
                        fail(Errc::ValidationError, "refinement box is not aligned with the level mesh");
                    cell_lo[k] = static_cast<int>(lo_it - unique.begin()) + 1;
                    cell_hi[k] = static_cast<int>(hi_it - unique.begin());
                }
                cells.insert_box(cell_lo, cell_hi);
            }
            input.raw_cells = std::move(cells);
        }
        else
            input.zero_forms = r.zero_forms;
        inputs[r.level] = std::move(input);
    }
    for (int l = 0; l < levels - 1; ++l)
        if (!seen[l])
        {
            // unspecified level: empty refinement
            std::vector<int> dims(dimension);
            for (int k = 0; k < dimension; ++k)
                dims[k] = level_spaces[l + 1].direction(k).num_cells();
            inputs[l].raw_cells = CellSet::empty(dims);
        }

    return DomainHierarchy::build(std::move(level_spaces), std::move(inputs));
}

RankOptions Scenario::rank_options() const
{
    RankOptions o;
    o.backend = options.backend == "exact" ? RankOptions::Backend::Exact : RankOptions::Backend::Floating;
    o.tolerance = options.tolerance;
    o.gap_threshold = options.gap_threshold;
    o.exact_cap = options.exact_cap;
    return o;
}

nlohmann::ordered_json admissibility_to_json(const AdmissibilityReport& report)
{
    nlohmann::ordered_json j;
    j["overall"] = report.overall;
    j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : report.violations)
    {
        nlohmann::ordered_json entry;
        entry["level"] = v.level;
        entry["i"] = v.i;
        entry["delta"] = v.delta;
        entry["reason"] = v.reason;
        j["violations"].push_back(entry);
    }
    j["pairs_swept"] = report.pairs_swept;
    j["chains_found"] = report.chains_found;
    return j;
}

nlohmann::ordered_json cohomology_to_json(const CohomologyReport& report)
{
    nlohmann::ordered_json j;
    j["dims"] = report.dims;
    j["spurious"] = report.spurious;
    j["space_dims"] = report.space_dims;
    j["ranks"] = report.ranks;
    j["backend"] = report.backend;
    j["rank_tolerance"] = report.rank_tolerance;
    j["indeterminate"] = report.indeterminate;
    j["elapsed_seconds"] = report.elapsed_seconds;
    return j;
}

RunResult run_check(const Scenario& scenario)
{
    const DomainHierarchy h = scenario.build();
    const AdmissibilityReport report = check_assumption3(h);
    RunResult result;
    result.report = admissibility_to_json(report);
    result.exit_code = report.overall ? 0 : 1;
    return result;
}

RunResult run_cohomology(const Scenario& scenario)
{
    const DomainHierarchy h = scenario.build();
    const HierarchicalBasis basis = kraft_select_all(h);
    const CohomologyReport report = cohomology_dims(h, basis, scenario.rank_options());
    RunResult result;
    result.report = cohomology_to_json(report);
    bool spurious = false;
    for (const std::int64_t s : report.spurious)
        spurious = spurious || s != 0;
    result.exit_code = report.indeterminate ? 3 : (spurious ? 1 : 0);
    return result;
}

RunResult run_harmonics(const Scenario& scenario)
{
    const DomainHierarchy h = scenario.build();
    const HierarchicalBasis basis = kraft_select_all(h);
    const CohomologyReport report = cohomology_dims(h, basis, scenario.rank_options());

    RunResult result;
    result.report = cohomology_to_json(report);
    result.report["harmonics"] = nlohmann::ordered_json::array();
    for (int j = 0; j <= h.n(); ++j)
    {
        const HarmonicSet set =
            harmonic_representatives(h, basis, j, scenario.options.tolerance, report.dims[j]);
        nlohmann::ordered_json entry;
        entry["j"] = j;
        entry["count"] = set.representatives.size();
        result.report["harmonics"].push_back(entry);
    }
    bool spurious = false;
    for (const std::int64_t s : report.spurious)
        spurious = spurious || s != 0;
    result.exit_code = report.indeterminate ? 3 : (spurious ? 1 : 0);
    return result;
}

} // namespace hbs
