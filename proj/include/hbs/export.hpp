#pragma once

#include "hbs/scenario.hpp"

#include <string>

namespace hbs
{

struct ExportRequest
{
    std::string what;   // mesh | greville | harmonic
    std::string format; // svg | vtk | csv
    std::string path;
    int resolution = 64;
};

/// Writes deterministic, byte-stable exports. Harmonic exports emit one file
/// per representative with a _j<j>_r<index> suffix before the extension.
void run_export(const Scenario& scenario, const ExportRequest& request);

} // namespace hbs
