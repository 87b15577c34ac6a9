#pragma once

#include "multimagic/bigint.hpp"
#include "multimagic/construct.hpp"
#include "multimagic/errors.hpp"
#include "multimagic/fixtures.hpp"
#include "multimagic/genmat.hpp"
#include "multimagic/io.hpp"
#include "multimagic/matrix.hpp"
#include "multimagic/numbering.hpp"
#include "multimagic/orders.hpp"
#include "multimagic/ring.hpp"
#include "multimagic/verify.hpp"
