#ifndef QANHO_QANHO_HPP
#define QANHO_QANHO_HPP

#include "qanho/basis.hpp"
#include "qanho/bound.hpp"
#include "qanho/hill.hpp"
#include "qanho/precision.hpp"
#include "qanho/report.hpp"
#include "qanho/series.hpp"

#endif  // QANHO_QANHO_HPP
