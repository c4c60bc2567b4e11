#pragma once

#include "lincompress/core.hpp"
#include "lincompress/io.hpp"
#include "lincompress/l1_scheme.hpp"
#include "lincompress/linalg.hpp"
#include "lincompress/linf_scheme.hpp"
#include "lincompress/lp_solver.hpp"
#include "lincompress/report.hpp"
#include "lincompress/verification.hpp"
#include "lincompress/zero_dim.hpp"
