#pragma once

#include "idm/conservative.hpp"
#include "idm/core.hpp"
#include "idm/credible.hpp"
#include "idm/exact_concave.hpp"
#include "idm/mutual_info.hpp"
#include "idm/oracle.hpp"
#include "idm/specialfn.hpp"
