#pragma once
// Umbrella header for the full library.

#include "addmix/csv.hpp"
#include "addmix/curie_weiss.hpp"
#include "addmix/errors.hpp"
#include "addmix/frobenius.hpp"
#include "addmix/harness.hpp"
#include "addmix/kernel.hpp"
#include "addmix/kl.hpp"
#include "addmix/lifted.hpp"
#include "addmix/partition_opt.hpp"
#include "addmix/spectral.hpp"
#include "addmix/sweep.hpp"
#include "addmix/types.hpp"
