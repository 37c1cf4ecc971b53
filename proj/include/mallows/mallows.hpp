#pragma once

#include "mallows/closed_forms.hpp"
#include "mallows/core.hpp"
#include "mallows/dyck.hpp"
#include "mallows/oracle.hpp"
#include "mallows/parallel.hpp"
#include "mallows/permuton.hpp"
#include "mallows/quadrature.hpp"
#include "mallows/rng.hpp"
#include "mallows/sampler.hpp"
#include "mallows/theory.hpp"
