#pragma once

#include "hcl/combinatorics.hpp"
#include "hcl/config.hpp"
#include "hcl/dense.hpp"
#include "hcl/detect.hpp"
#include "hcl/diagnostics.hpp"
#include "hcl/errors.hpp"
#include "hcl/harness.hpp"
#include "hcl/io.hpp"
#include "hcl/model.hpp"
#include "hcl/parallel.hpp"
#include "hcl/recover.hpp"
#include "hcl/rng.hpp"
#include "hcl/spectral.hpp"
