#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "zoneforge/csv.hpp"
#include "zoneforge/geography.hpp"
#include "zoneforge/rng.hpp"

using namespace zoneforge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("zoneforge_geo_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void put(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

void write_toy_world(const fs::path& d, const std::string& flows_body =
                                            "origin_id,dest_id,count\n"
                                            "a,a,5\na,b,1\nb,a,2\nb,b,4\nc,c,7\n") {
  put(d / "municipalities.csv", "id,name\na,Alpha\nb,Beta\nc,Gamma\n");
  put(d / "flows.csv", flows_body);
  put(d / "distances.csv", "id_a,id_b,seconds\na,b,600\na,c,1200\nb,c,700\n");
  put(d / "adjacency.csv", "id_a,id_b\na,b\nb,c\n");
  put(d / "agencies.csv",
      "municipality_id,agency_id,from_quarter,to_quarter\n"
      "a,A1,2005Q1,2010Q1\nb,A1,2005Q1,2010Q1\nc,A2,2005Q1,2010Q1\n");
}

}  // namespace

TEST_SUITE("geo") {

TEST_CASE("quarter encoding round trips and rejects malformed input") {
  CHECK(make_quarter(2005, 1) == 2005 * 4);
  CHECK(format_quarter(parse_quarter("2012Q3")) == "2012Q3");
  CHECK(parse_quarter("2005Q1") + 4 == parse_quarter("2006Q1"));
  CHECK_THROWS_AS(parse_quarter("2005"), ValidationError);
  CHECK_THROWS_AS(parse_quarter("2005Q5"), ValidationError);
  CHECK_THROWS_AS(parse_quarter("20x5Q1"), ValidationError);
}

TEST_CASE("labour forces are the flow margins") {
  // P = [[5,1],[2,4]] -> rlf = (6,6), llf = (7,5)
  auto m = geo::CommutingMatrix::from_triplets(2, {{0, 0, 5}, {0, 1, 1}, {1, 0, 2}, {1, 1, 4}});
  auto [rlf, llf] = geo::derive_labour_forces(m);
  CHECK(rlf == std::vector<std::int64_t>{6, 6});
  CHECK(llf == std::vector<std::int64_t>{7, 5});

  // diagonal-only matrix: nobody commutes
  auto diag = geo::CommutingMatrix::from_triplets(3, {{0, 0, 3}, {1, 1, 9}, {2, 2, 1}});
  auto [r2, l2] = geo::derive_labour_forces(diag);
  CHECK(r2 == l2);
}

TEST_CASE("labour force is conserved on random matrices") {
  rng::Generator gen(42);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::tuple<int, int, std::int64_t>> cells;
    std::int64_t brute_total = 0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        std::int64_t c = static_cast<std::int64_t>(gen.uniform_index(50));
        cells.emplace_back(i, j, c);
        brute_total += c;  // independent double sum
      }
    auto m = geo::CommutingMatrix::from_triplets(10, cells);
    auto [rlf, llf] = geo::derive_labour_forces(m);
    std::int64_t sr = 0, sl = 0;
    for (auto v : rlf) sr += v;
    for (auto v : llf) sl += v;
    CHECK(sr == brute_total);
    CHECK(sl == brute_total);
    CHECK(m.total() == brute_total);
  }
}

TEST_CASE("duplicate flow records are summed") {
  auto m = geo::CommutingMatrix::from_triplets(2, {{0, 1, 3}, {0, 1, 4}});
  CHECK(m.at(0, 1) == 7);
}

TEST_CASE("loading a toy world derives labour forces from flows") {
  auto d = temp_dir("load");
  write_toy_world(d);
  geo::Geography g = geo::load_geography(geo::GeoPaths::in_directory(d));
  REQUIRE(g.size() == 3);
  CHECK(g.municipalities[0].rlf == 6);
  CHECK(g.municipalities[1].rlf == 6);
  CHECK(g.municipalities[2].rlf == 7);
  CHECK(g.municipalities[0].llf == 7);
  CHECK(g.distances(0, 1) == 600.0);
  CHECK(g.distances(1, 0) == 600.0);
  CHECK(g.adjacency.adjacent(0, 1));
  CHECK_FALSE(g.adjacency.adjacent(0, 2));
  CHECK(g.agencies.segment_count() == 1);
}

TEST_CASE("negative flow entries are rejected with the offending row") {
  auto d = temp_dir("negflow");
  write_toy_world(d, "origin_id,dest_id,count\na,a,5\nb,b,-2\nc,c,7\n");
  try {
    geo::load_geography(geo::GeoPaths::in_directory(d));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("flows.csv:3") != std::string::npos);
    CHECK(msg.find("negative") != std::string::npos);
  }
}

TEST_CASE("a gap in the agency timeline is rejected") {
  auto d = temp_dir("gap");
  write_toy_world(d);
  put(d / "agencies.csv",
      "municipality_id,agency_id,from_quarter,to_quarter\n"
      "a,A1,2005Q1,2007Q1\nb,A1,2005Q1,2010Q1\nc,A1,2005Q1,2010Q1\n"
      "a,A1,2007Q3,2010Q1\n");  // a is uncovered in 2007Q1..2007Q3
  try {
    geo::load_geography(geo::GeoPaths::in_directory(d));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("timeline gap") != std::string::npos);
  }
}

TEST_CASE("supplied labour forces must match the flow margins exactly") {
  auto d = temp_dir("mismatch");
  write_toy_world(d);
  put(d / "municipalities.csv", "id,name,rlf,llf\na,Alpha,6,7\nb,Beta,5,5\nc,Gamma,7,7\n");
  CHECK_THROWS_AS(geo::load_geography(geo::GeoPaths::in_directory(d)), ValidationError);
}

TEST_CASE("unknown ids in flows are dropped with a warning") {
  auto d = temp_dir("crossborder");
  write_toy_world(d,
                  "origin_id,dest_id,count\na,a,5\na,b,1\nb,a,2\nb,b,4\nc,c,7\nZZ,a,10\na,ZZ,3\n");
  geo::Geography g = geo::load_geography(geo::GeoPaths::in_directory(d));
  CHECK(g.municipalities[0].rlf == 6);  // the a->ZZ record did not count
  REQUIRE(!g.warnings.empty());
  CHECK(g.warnings.front().find("2 records") != std::string::npos);
}

TEST_CASE("adjacency is synthesized from driving times when the file is absent") {
  auto d = temp_dir("noadj");
  write_toy_world(d);
  fs::remove(d / "adjacency.csv");
  geo::GeoConfig cfg;
  cfg.adjacency_threshold_seconds = 650.0;
  geo::Geography g = geo::load_geography(geo::GeoPaths::in_directory(d), cfg);
  CHECK(g.adjacency.adjacent(0, 1));        // 600 s
  CHECK_FALSE(g.adjacency.adjacent(1, 2));  // 700 s
}

TEST_CASE("an emitted world reloads bit-exactly") {
  auto d = temp_dir("roundtrip");
  write_toy_world(d);
  geo::Geography g = geo::load_geography(geo::GeoPaths::in_directory(d));
  auto out1 = temp_dir("roundtrip_out1");
  auto out2 = temp_dir("roundtrip_out2");
  geo::write_geography(g, out1);
  geo::Geography g2 = geo::load_geography(geo::GeoPaths::in_directory(out1));
  geo::write_geography(g2, out2);
  for (const char* f :
       {"municipalities.csv", "flows.csv", "distances.csv", "adjacency.csv", "agencies.csv"}) {
    std::ifstream a(out1 / f), b(out2 / f);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
  }
  CHECK(g2.municipalities[2].rlf == g.municipalities[2].rlf);
  CHECK(g2.flows.total() == g.flows.total());
}

TEST_CASE("distance file must cover every pair and stay symmetric") {
  auto d = temp_dir("distcover");
  write_toy_world(d);
  put(d / "distances.csv", "id_a,id_b,seconds\na,b,600\n");
  CHECK_THROWS_AS(geo::load_geography(geo::GeoPaths::in_directory(d)), ValidationError);

  write_toy_world(d);
  put(d / "distances.csv",
      "id_a,id_b,seconds\na,b,600\nb,a,601\na,c,1200\nb,c,700\n");  // conflict
  CHECK_THROWS_AS(geo::load_geography(geo::GeoPaths::in_directory(d)), ValidationError);
}

TEST_CASE("missing input files name the path") {
  auto d = temp_dir("missing");
  write_toy_world(d);
  fs::remove(d / "flows.csv");
  try {
    geo::load_geography(geo::GeoPaths::in_directory(d));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("flows.csv") != std::string::npos);
  }
}

}  // TEST_SUITE
