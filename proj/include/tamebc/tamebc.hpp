#pragma once

#include "tamebc/errors.hpp"
#include "tamebc/modarith.hpp"
#include "tamebc/localfield.hpp"
#include "tamebc/matrix.hpp"
#include "tamebc/matgrp.hpp"
#include "tamebc/descent.hpp"
#include "tamebc/rational.hpp"
#include "tamebc/lattice.hpp"
#include "tamebc/torus.hpp"
#include "tamebc/orbital.hpp"
#include "tamebc/sampling.hpp"
#include "tamebc/checks.hpp"
#include "tamebc/campaign.hpp"
