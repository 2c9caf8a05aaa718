#pragma once

// Everything except the JSON document layer (io.hpp, cli.hpp), which needs
// nlohmann/json on the include path.

#include "cosea/errors.hpp"
#include "cosea/tolerances.hpp"
#include "cosea/linalg.hpp"
#include "cosea/algebra.hpp"
#include "cosea/core.hpp"
#include "cosea/backends.hpp"
#include "cosea/spectral.hpp"
#include "cosea/sampling.hpp"
#include "cosea/structure.hpp"
#include "cosea/conditioning.hpp"
#include "cosea/representation.hpp"
#include "cosea/audit.hpp"
#include "cosea/theorems.hpp"
