#pragma once

#include <string>
#include <vector>

#include "cmt/curves.hpp"

namespace cmt {

// Readers for the curve input files. Comma-separated, '.' decimal, one header
// row; blank lines and lines starting with '#' are ignored.

/// Header `t,df`.
DiscountCurve load_discount_csv(const std::string& path, bool allow_extrapolation = false);

/// Header `t,lambda`.
HazardCurve load_hazard_csv(const std::string& path, bool allow_extrapolation = false);

/// Header `maturity,coupon,frequency,price` with an optional fifth column
/// `type` holding `clean` or `dirty` (default dirty).
std::vector<BondQuote> load_bond_quotes_csv(const std::string& path);

}  // namespace cmt
