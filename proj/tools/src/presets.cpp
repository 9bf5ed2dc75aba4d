#include <map>

#include "harness.hpp"

namespace relsmooth::harness {

namespace {

const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> table = {
        {"figure1", R"(; Quartic-regularized quadratic, n = 100, started far from the optimum.
; Classical GD uses the Euclidean constant of the initial sublevel set.
[experiment]
name = figure1
replicates = 10
base_seed = 0
stride = epoch

[problem]
builder = quad_quartic
n = 100
seed = replicate
a = 0.1
reference_quartic = 1.0

[start]
kind = normal
scale = 1000
seed = replicate

[algorithm.gd]
method = gradient_descent
L = sublevel
epochs = 100

[algorithm.relgd]
method = relgd
epochs = 100

[algorithm.relrcd]
method = relrcd
tau = 1
epochs = 100
)"},
        {"figure2", R"(; Poisson inverse problem, m = 1000 rows, n = 10 unknowns, one fixed instance.
; Epochs count oracle rows / m for the stochastic runs.
[experiment]
name = figure2
replicates = 10
base_seed = 0
stride = epoch

[problem]
builder = poisson_kl
m = 1000
n = 10
seed = 0

[start]
kind = abs_normal
scale = 1
seed = 0

[algorithm.relgd]
method = relgd
epochs = 100

[algorithm.relsgd_constant]
method = relsgd
schedule = constant
schedule_scale = 1
epochs = 100

[algorithm.relsgd_sqrt]
method = relsgd
schedule = sqrt_growth
schedule_scale = 0.1
epochs = 100
)"},
    };
    return table;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : presets()) {
        out.push_back(name);
    }
    return out;
}

std::string preset_text(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return it->second;
}

}  // namespace relsmooth::harness
