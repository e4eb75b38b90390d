#ifndef QHAAR_QHAAR_HPP_
#define QHAAR_QHAAR_HPP_

#include "qhaar/padic.hpp"
#include "qhaar/stepfn.hpp"
#include "qhaar/mra.hpp"
#include "qhaar/waveletgen.hpp"
#include "qhaar/transform.hpp"
#include "qhaar/io.hpp"

#endif  // QHAAR_QHAAR_HPP_
