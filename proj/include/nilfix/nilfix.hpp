#pragma once

#include "nilfix/exact_linalg.hpp"
#include "nilfix/malcev_group.hpp"
#include "nilfix/endomorphism.hpp"
#include "nilfix/twisted_conjugacy.hpp"
#include "nilfix/nvalued_map.hpp"
#include "nilfix/torus_oracle.hpp"
#include "nilfix/json_io.hpp"
#include "nilfix/cli.hpp"
