#pragma once

#include "platecharge/errors.hpp"
#include "platecharge/fields.hpp"
#include "platecharge/inference.hpp"
#include "platecharge/instrument.hpp"
#include "platecharge/least_squares.hpp"
#include "platecharge/oracle.hpp"
#include "platecharge/quadrature.hpp"
#include "platecharge/random.hpp"
#include "platecharge/records_csv.hpp"
#include "platecharge/survey.hpp"
