#pragma once

#include <iosfwd>
#include <string>

#include "bsl/mcmc.hpp"

namespace bsl {

// Doubles in run outputs are printed with %.17g: round-trip exact, and
// byte-stable across reruns of the same seed.
std::string format_double(double v);

// Header: iter,accepted,loglik,theta_1..theta_k[,gamma_1..gamma_d]
// iter counts retained (post-burn-in) states from 0.
void write_trace_csv(const Trace& trace, std::ostream& os);

// Inverse of write_trace_csv, for the diagnose command.  burn_in is not in
// the file and stays 0.  Throws IoError on any malformed content.
Trace read_trace_csv(std::istream& is);
Trace read_trace_csv_file(const std::string& path);

}  // namespace bsl
