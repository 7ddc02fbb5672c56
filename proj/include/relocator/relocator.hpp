#pragma once

#include "relocator/benchgen.hpp"
#include "relocator/cache.hpp"
#include "relocator/config.hpp"
#include "relocator/error.hpp"
#include "relocator/hybrid.hpp"
#include "relocator/metrics.hpp"
#include "relocator/model.hpp"
#include "relocator/optimizer.hpp"
#include "relocator/property.hpp"
#include "relocator/random.hpp"
#include "relocator/report.hpp"
#include "relocator/similarity.hpp"
#include "relocator/similo.hpp"
#include "relocator/snapshot_io.hpp"
#include "relocator/von.hpp"
