#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>

#include "bsl/errors.hpp"
#include "bsl/mcmc.hpp"
#include "bsl/seed_stream.hpp"
#include "bsl/trace_io.hpp"

namespace {

bsl::Trace make_trace(int n, int k, int d, std::uint64_t seed) {
    bsl::Trace tr;
    bsl::Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        bsl::Vector th(k);
        for (int j = 0; j < k; ++j) th[j] = rng.normal() * std::pow(10.0, j - 1);
        tr.thetas.push_back(th);
        tr.logliks.push_back(-50.0 + rng.normal());
        tr.accepted.push_back(rng.uniform() < 0.3 ? 1 : 0);
        if (d > 0) {
            bsl::Vector g(d);
            for (int j = 0; j < d; ++j) g[j] = rng.normal() * 1e-3;
            tr.adjustments.push_back(g);
        }
    }
    return tr;
}

}  // namespace

TEST_CASE("format_double round-trips through strtod") {
    for (double v : {0.1, 1.0 / 3.0, 1e300, 1e-300, -0.0, 2.2250738585072014e-308,
                     4.9e-324, 123456789.123456789, -1.7976931348623157e308}) {
        const std::string s = bsl::format_double(v);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
        // -0.0 keeps its sign bit through the text form
        if (v == 0.0) CHECK(std::signbit(back) == std::signbit(v));
    }
    CHECK(bsl::format_double(1.0) == "1");
    CHECK(bsl::format_double(0.5) == "0.5");
}

TEST_CASE("trace csv round-trips bitwise") {
    const auto tr = make_trace(200, 3, 0, 42);
    std::ostringstream os;
    bsl::write_trace_csv(tr, os);

    std::istringstream is(os.str());
    const auto back = bsl::read_trace_csv(is);
    REQUIRE(back.size() == tr.size());
    REQUIRE(back.param_dim() == 3);
    CHECK(back.adjustment_dim() == 0);
    for (int i = 0; i < tr.size(); ++i) {
        const auto u = static_cast<size_t>(i);
        CHECK(back.logliks[u] == tr.logliks[u]);
        CHECK(back.accepted[u] == tr.accepted[u]);
        for (int j = 0; j < 3; ++j) CHECK(back.thetas[u][j] == tr.thetas[u][j]);
    }
}

TEST_CASE("trace csv round-trips adjustment columns") {
    const auto tr = make_trace(50, 1, 2, 43);
    std::ostringstream os;
    bsl::write_trace_csv(tr, os);
    const std::string text = os.str();
    CHECK(text.rfind("iter,accepted,loglik,theta_1,gamma_1,gamma_2\n", 0) == 0);

    std::istringstream is(text);
    const auto back = bsl::read_trace_csv(is);
    REQUIRE(back.adjustment_dim() == 2);
    for (int i = 0; i < tr.size(); ++i) {
        const auto u = static_cast<size_t>(i);
        CHECK(back.adjustments[u][0] == tr.adjustments[u][0]);
        CHECK(back.adjustments[u][1] == tr.adjustments[u][1]);
    }
}

TEST_CASE("iter column counts retained states from zero") {
    const auto tr = make_trace(3, 1, 0, 44);
    std::ostringstream os;
    bsl::write_trace_csv(tr, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);  // header
    std::getline(is, line);
    CHECK(line.rfind("0,", 0) == 0);
    std::getline(is, line);
    CHECK(line.rfind("1,", 0) == 0);
}

TEST_CASE("malformed traces are IoError") {
    auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return bsl::read_trace_csv(is);
    };

    CHECK_THROWS_AS(parse(""), bsl::IoError);
    CHECK_THROWS_AS(parse("wrong,header,loglik\n"), bsl::IoError);
    CHECK_THROWS_AS(parse("iter,accepted,loglik\n"), bsl::IoError);  // no theta
    CHECK_THROWS_AS(parse("iter,accepted,loglik,theta_2\n"), bsl::IoError);
    CHECK_THROWS_AS(parse("iter,accepted,loglik,theta_1,junk\n"), bsl::IoError);
    // gamma before theta is not a legal layout
    CHECK_THROWS_AS(parse("iter,accepted,loglik,gamma_1,theta_1\n"), bsl::IoError);
    // field count mismatch
    CHECK_THROWS_AS(parse("iter,accepted,loglik,theta_1\n0,1\n"), bsl::IoError);
    CHECK_THROWS_AS(parse("iter,accepted,loglik,theta_1\n0,1,-1.0,0.5,9\n"),
                    bsl::IoError);
    // non-numeric payload
    CHECK_THROWS_AS(parse("iter,accepted,loglik,theta_1\n0,1,abc,0.5\n"),
                    bsl::IoError);
    CHECK_THROWS_AS(parse("iter,accepted,loglik,theta_1\n0,1,-1.0,0.5x\n"),
                    bsl::IoError);

    CHECK_THROWS_AS(bsl::read_trace_csv_file("/nonexistent/trace.csv"), bsl::IoError);
}

TEST_CASE("crlf and blank lines are tolerated") {
    std::istringstream is("iter,accepted,loglik,theta_1\r\n0,1,-2.5,0.25\r\n\n");
    const auto tr = bsl::read_trace_csv(is);
    REQUIRE(tr.size() == 1);
    CHECK(tr.logliks[0] == -2.5);
    CHECK(tr.thetas[0][0] == 0.25);
    CHECK(tr.accepted[0] == 1);
}
