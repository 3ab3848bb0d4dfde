#ifndef SSB_SSB_HPP
#define SSB_SSB_HPP

#include "ssb/bundle.hpp"
#include "ssb/closed_form.hpp"
#include "ssb/dual.hpp"
#include "ssb/errors.hpp"
#include "ssb/expr.hpp"
#include "ssb/families.hpp"
#include "ssb/fields.hpp"
#include "ssb/lemmas.hpp"
#include "ssb/levi_civita.hpp"
#include "ssb/linalg.hpp"
#include "ssb/oracle.hpp"
#include "ssb/richardson.hpp"
#include "ssb/sampling.hpp"
#include "ssb/smooth_fn.hpp"
#include "ssb/weights.hpp"

#endif // SSB_SSB_HPP
