#include <catch_amalgamated.hpp>

#include <sstream>

#include "natext/natext.hpp"

using namespace natext;

TEST_CASE("csv quoting", "[cli]")
{
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(csv_field("") == "");
    std::ostringstream os;
    csv_row(os, {"n", "word", "x"});
    csv_row(os, {"3", "1,2,1", "0.5"});
    CHECK(os.str() == "n,word,x\r\n3,\"1,2,1\",0.5\r\n");
}

TEST_CASE("strict number parsing", "[cli]")
{
    CHECK(parse_real<double>("0.25") == 0.25);
    CHECK(parse_real<double>("1e-3") == 1e-3);
    CHECK_THROWS(parse_real<double>("0.25x"));
    CHECK_THROWS(parse_real<double>("abc"));
    CHECK_THROWS(parse_real<double>(""));
    CHECK(abs(parse_real<quad>("0.1") - quad(1) / 10) < quad(1e-33));
}

TEST_CASE("full precision formatting", "[cli]")
{
    double x = 0.1 + 0.2;
    CHECK(parse_real<double>(to_string(x)) == x);
    quad q = quad(1) / 3;
    CHECK(parse_real<quad>(to_string(q)) == q);
    CHECK(to_string(q).size() > 30);
}

TEST_CASE("kind names round trip", "[cli]")
{
    for (auto k : {DomainKind::interior_small, DomainKind::zeta_small, DomainKind::eta_small, DomainKind::large_left,
                   DomainKind::large_right, DomainKind::delta, DomainKind::endpoint_large, DomainKind::sweep})
        CHECK(parse_kind(kind_name(k)) == k);
    CHECK_THROWS(parse_kind("bogus"));
    CHECK(std::string(verdict_name(Verdict::pass)) == "pass");
    CHECK(std::string(status_name(SyncStatus::inconclusive)) == "inconclusive");
}
