#include "bsl/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "bsl/errors.hpp"

namespace bsl {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(const Trace& trace, std::ostream& os) {
    const int k = trace.param_dim();
    const int d = trace.adjustment_dim();
    os << "iter,accepted,loglik";
    for (int j = 1; j <= k; ++j) os << ",theta_" << j;
    for (int j = 1; j <= d; ++j) os << ",gamma_" << j;
    os << "\n";
    for (int i = 0; i < trace.size(); ++i) {
        os << i << ',' << (trace.accepted[static_cast<size_t>(i)] ? 1 : 0) << ','
           << format_double(trace.logliks[static_cast<size_t>(i)]);
        for (int j = 0; j < k; ++j)
            os << ',' << format_double(trace.thetas[static_cast<size_t>(i)][j]);
        for (int j = 0; j < d; ++j)
            os << ',' << format_double(trace.adjustments[static_cast<size_t>(i)][j]);
        os << "\n";
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, long line_no) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        std::ostringstream os;
        os << "trace csv: bad numeric field '" << s << "' on line " << line_no;
        throw IoError(os.str());
    }
}

}  // namespace

Trace read_trace_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("trace csv: empty file");
    const auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "iter" || header[1] != "accepted" ||
        header[2] != "loglik")
        throw IoError("trace csv: header must start with iter,accepted,loglik");

    int k = 0, d = 0;
    size_t col = 3;
    while (col < header.size() &&
           header[col] == "theta_" + std::to_string(k + 1)) {
        ++k;
        ++col;
    }
    while (col < header.size() &&
           header[col] == "gamma_" + std::to_string(d + 1)) {
        ++d;
        ++col;
    }
    if (col != header.size() || k == 0)
        throw IoError("trace csv: header columns must be theta_1..theta_k then "
                      "gamma_1..gamma_d");

    Trace trace;
    long line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            std::ostringstream os;
            os << "trace csv: line " << line_no << " has " << fields.size()
               << " fields, expected " << header.size();
            throw IoError(os.str());
        }
        trace.accepted.push_back(parse_double(fields[1], line_no) != 0.0 ? 1 : 0);
        trace.logliks.push_back(parse_double(fields[2], line_no));
        ParameterVector theta(k);
        for (int j = 0; j < k; ++j)
            theta[j] = parse_double(fields[static_cast<size_t>(3 + j)], line_no);
        trace.thetas.push_back(std::move(theta));
        if (d > 0) {
            Vector g(d);
            for (int j = 0; j < d; ++j)
                g[j] = parse_double(fields[static_cast<size_t>(3 + k + j)], line_no);
            trace.adjustments.push_back(std::move(g));
        }
    }
    return trace;
}

Trace read_trace_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("trace csv: cannot open " + path);
    return read_trace_csv(f);
}

}  // namespace bsl
