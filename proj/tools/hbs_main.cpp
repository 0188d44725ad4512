#include "hbs/error.hpp"
#include "hbs/export.hpp"
#include "hbs/scenario.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <semaphore>
#include <vector>

namespace
{

int max_threads()
{
    if (const char* env = std::getenv("HBS_THREADS"))
    {
        const int value = std::atoi(env);
        if (value > 0)
            return value;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void apply_overrides(hbs::Scenario& scenario, const std::string& backend, double tolerance)
{
    if (!backend.empty())
        scenario.options.backend = backend;
    if (tolerance > 0)
        scenario.options.tolerance = tolerance;
}

void write_report(const nlohmann::ordered_json& report, const std::string& out_dir,
                  const std::string& name)
{
    if (out_dir.empty())
        return;
    std::filesystem::create_directories(out_dir);
    std::ofstream out(std::filesystem::path(out_dir) / name);
    out << report.dump(2) << "\n";
}

int exit_code_for(const hbs::Error& e)
{
    return 2; // configuration / input errors
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hierarchical B-spline de Rham complex toolkit"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string backend;
    double tolerance = -1;
    std::string out_dir;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--backend", backend, "exact|float")->check(CLI::IsMember({"exact", "float"}));
        cmd->add_option("--tol", tolerance, "floating rank tolerance");
        cmd->add_option("--out", out_dir, "directory for report files");
    };

    CLI::App* check = app.add_subcommand("check", "verify the local admissibility conditions");
    add_common(check);
    CLI::App* cohomology = app.add_subcommand("cohomology", "measure cohomology dimensions");
    add_common(cohomology);
    CLI::App* harmonics = app.add_subcommand("harmonics", "extract harmonic representatives");
    add_common(harmonics);

    CLI::App* exporter = app.add_subcommand("export", "write mesh/greville/harmonic files");
    std::string what, format, out_path;
    int resolution = 64;
    exporter->add_option("scenario", scenario_path, "scenario JSON file")->required();
    exporter->add_option("--what", what, "mesh|greville|harmonic")
        ->required()
        ->check(CLI::IsMember({"mesh", "greville", "harmonic"}));
    exporter->add_option("--format", format, "svg|vtk|csv")
        ->required()
        ->check(CLI::IsMember({"svg", "vtk", "csv"}));
    exporter->add_option("--path", out_path, "output file")->required();
    exporter->add_option("--resolution", resolution, "sampling resolution per direction");
    exporter->add_option("--backend", backend, "exact|float")->check(CLI::IsMember({"exact", "float"}));
    exporter->add_option("--tol", tolerance, "floating rank tolerance");

    CLI::App* batch = app.add_subcommand("batch", "run cohomology over many scenarios");
    std::vector<std::string> batch_paths;
    batch->add_option("scenarios", batch_paths, "scenario JSON files")->required();
    batch->add_option("--backend", backend, "exact|float")->check(CLI::IsMember({"exact", "float"}));
    batch->add_option("--tol", tolerance, "floating rank tolerance");
    batch->add_option("--out", out_dir, "directory for report files");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (check->parsed() || cohomology->parsed() || harmonics->parsed())
        {
            hbs::Scenario scenario = hbs::Scenario::load(scenario_path);
            apply_overrides(scenario, backend, tolerance);
            hbs::RunResult result;
            std::string report_name;
            if (check->parsed())
            {
                result = hbs::run_check(scenario);
                report_name = "check.json";
            }
            else if (cohomology->parsed())
            {
                result = hbs::run_cohomology(scenario);
                report_name = "cohomology.json";
            }
            else
            {
                result = hbs::run_harmonics(scenario);
                report_name = "harmonics.json";
            }
            std::cout << result.report.dump(2) << "\n";
            write_report(result.report, out_dir, report_name);
            return result.exit_code;
        }
        if (exporter->parsed())
        {
            hbs::Scenario scenario = hbs::Scenario::load(scenario_path);
            apply_overrides(scenario, backend, tolerance);
            hbs::ExportRequest request{what, format, out_path, resolution};
            hbs::run_export(scenario, request);
            return 0;
        }
        if (batch->parsed())
        {
            std::counting_semaphore<256> slots(std::min(max_threads(), 256));
            std::vector<std::future<int>> futures;
            for (const std::string& path : batch_paths)
            {
                futures.push_back(std::async(std::launch::async, [&, path] {
                    slots.acquire();
                    int code = 0;
                    try
                    {
                        hbs::Scenario scenario = hbs::Scenario::load(path);
                        apply_overrides(scenario, backend, tolerance);
                        const hbs::RunResult result = hbs::run_cohomology(scenario);
                        const std::string name =
                            std::filesystem::path(path).stem().string() + ".cohomology.json";
                        write_report(result.report, out_dir, name);
                        code = result.exit_code;
                    }
                    catch (const hbs::Error& e)
                    {
                        std::cerr << path << ": " << e.what() << "\n";
                        code = 2;
                    }
                    slots.release();
                    return code;
                }));
            }
            int worst = 0;
            for (auto& f : futures)
                worst = std::max(worst, f.get());
            return worst;
        }
    }
    catch (const hbs::Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
