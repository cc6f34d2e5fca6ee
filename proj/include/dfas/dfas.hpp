#pragma once

#include "dfas/attach.hpp"
#include "dfas/backward.hpp"
#include "dfas/ccp.hpp"
#include "dfas/cp.hpp"
#include "dfas/expr.hpp"
#include "dfas/forward.hpp"
#include "dfas/integer.hpp"
#include "dfas/lattice.hpp"
#include "dfas/lcp.hpp"
#include "dfas/model.hpp"
#include "dfas/model_io.hpp"
#include "dfas/oracle.hpp"
#include "dfas/report.hpp"
#include "dfas/vcfg.hpp"
