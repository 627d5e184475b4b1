#pragma once

#include "settings.hpp"

namespace pdcli {

// Each returns the process exit code: 0 on success, 4 when the run finished
// without converging (outputs are still written).
int cmd_simulate(Settings s);
int cmd_analyze(Settings s);
int cmd_fit(Settings s);
int cmd_generate(Settings s);
int cmd_graph(Settings s);

}  // namespace pdcli
