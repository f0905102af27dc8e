#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "repscore/error.hpp"
#include "repscore/survey.hpp"

using namespace repscore;

namespace {

#ifndef REPSCORE_DATA_DIR
#define REPSCORE_DATA_DIR "data"
#endif

const GeoRollup& rollup() {
    static const GeoRollup r = GeoRollup::load(std::filesystem::path(REPSCORE_DATA_DIR) / "geo_rollup.csv");
    return r;
}

ColumnMapping mapping(std::initializer_list<std::pair<const std::string, std::string>> columns) {
    ColumnMapping m;
    m.columns = columns;
    return m;
}

template <typename F>
Error error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an Error");
    return Error(ErrorCode::IoError, "unreachable");
}

}  // namespace

TEST_SUITE("survey_ingest") {

TEST_CASE("age brackets") {
    const auto b = AgeBracketing::standard();
    CHECK(b.brackets.size() == 6);
    CHECK_NOTHROW(b.validate());
    CHECK(bracket_age(30, b) == "26-35");
    CHECK(bracket_age(65, b) == "56-65");
    CHECK(bracket_age(66, b) == "65+");
    CHECK(bracket_age(18, b) == "18-25");
    CHECK(bracket_age(25, b) == "18-25");
    CHECK(bracket_age(26, b) == "26-35");
    CHECK(bracket_age(104, b) == "65+");
    CHECK(error_of([&] { bracket_age(17, b); }).code() == ErrorCode::OutOfRange);

    AgeBracketing gap{{{"a", 18, 30}, {"b", 31, std::nullopt}}};
    CHECK_THROWS_AS(gap.validate(), Error);
}

TEST_CASE("full mapping keeps every row") {
    std::ostringstream csv;
    csv << "country,gender\n";
    for (int i = 0; i < 1000; ++i) csv << (i % 2 ? "KEN" : "FRA") << "," << (i % 3 ? "female" : "male") << "\n";
    auto m = mapping({{"country", "country"}, {"gender", "gender"}});
    m.domains["gender"] = {"female", "male"};
    auto data = parse_survey(parse_csv(csv.str()), m, &rollup());
    CHECK(data.n_total == 1000);
    CHECK(data.n_dropped == 0);
}

TEST_CASE("lenient mode drops and ledgers unmappable labels") {
    std::ostringstream csv;
    csv << "gender\n";
    for (int i = 0; i < 997; ++i) csv << (i % 2 ? "female" : "male") << "\n";
    csv << "robot\nrobot\nunknown-x\n";
    auto m = mapping({{"gender", "gender"}});
    m.domains["gender"] = {"female", "male"};
    m.strict = false;
    auto data = parse_survey(parse_csv(csv.str()), m);
    CHECK(data.n_total == 997);
    CHECK(data.n_dropped == 3);
    CHECK(data.dropped.at("unmappable_gender") == 3);
    CHECK(data.quarantined_values.at("gender").at("robot") == 2);

    m.strict = true;
    auto err = error_of([&] { parse_survey(parse_csv(csv.str(), "s.csv"), m); });
    CHECK(err.code() == ErrorCode::HarmonizationError);
    CHECK(std::string(err.what()).find("s.csv:999") != std::string::npos);
}

TEST_CASE("aliases and case folding") {
    auto m = mapping({{"gender", "sex"}, {"country", "nation"}});
    m.aliases["gender"] = {{"F", "female"}, {"M", "male"}};
    m.domains["gender"] = {"female", "male"};
    m.domains["country"] = {"KEN", "FRA"};
    auto data = parse_survey(parse_csv("sex,nation\nf,Kenya\nM,FRA\nFemale,france\n"), m, &rollup());
    REQUIRE(data.n_total == 3);
    CHECK(data.rows[0] == std::vector<std::string>{"KEN", "female"});
    CHECK(data.rows[1] == std::vector<std::string>{"FRA", "male"});
    CHECK(data.rows[2] == std::vector<std::string>{"FRA", "female"});
}

TEST_CASE("missing mapped column is a schema error") {
    auto err = error_of([] { parse_survey(parse_csv("gender\nfemale\n"), mapping({{"country", "country"}})); });
    CHECK(err.code() == ErrorCode::SchemaError);
}

TEST_CASE("raw ages are bracketed") {
    auto m = mapping({{"age_group", "age"}});
    m.age_mode = AgeMode::RawYears;
    m.domains["age_group"] = AgeBracketing::standard().labels();
    auto data = parse_survey(parse_csv("age\n30\n65\n66\n17\n"), m);
    CHECK(data.n_total == 3);
    CHECK(data.rows[1][0] == "56-65");
    CHECK(data.rows[2][0] == "65+");
    CHECK(data.dropped.at("age_out_of_range") == 1);

    m.domains["age_group"] = {"18-29", "30+"};
    CHECK(error_of([&] { parse_survey(parse_csv("age\n30\n"), m); }).code() == ErrorCode::SchemaError);
}

TEST_CASE("missing values stay in the data") {
    auto m = mapping({{"country", "country"}, {"religion", "religion"}});
    auto data = parse_survey(parse_csv("country,religion\nKEN,christian\nKEN,NA\n"), m, &rollup());
    CHECK(data.n_total == 2);
    auto proj = project_sample(data, DimensionSpec::from_axes({"country", "religion"}), rollup());
    CHECK(proj.distribution.source_size() == 1);
    CHECK(proj.excluded.at("missing_religion") == 1);
    auto country = project_sample(data, DimensionSpec::from_axes({"country"}), rollup());
    CHECK(country.distribution.source_size() == 2);
}

TEST_CASE("projection onto country and continent") {
    auto m = mapping({{"country", "country"}, {"gender", "gender"}});
    auto data = parse_survey(parse_csv("country,gender\nKEN,F\nKEN,F\nNGA,M\nFRA,F\n"), m, &rollup());
    auto country = to_sample_distribution(data, DimensionSpec::from_axes({"country"}), rollup());
    CHECK(country[{"KEN"}] == doctest::Approx(0.5));
    CHECK(country[{"NGA"}] == doctest::Approx(0.25));
    CHECK(country[{"FRA"}] == doctest::Approx(0.25));
    CHECK(country.source_size() == 4);

    auto continent = to_sample_distribution(data, DimensionSpec::from_axes({"continent"}), rollup());
    CHECK(continent[{"Africa"}] == doctest::Approx(0.75));
    CHECK(continent[{"Europe"}] == doctest::Approx(0.25));

    auto err = error_of([&] { to_sample_distribution(data, DimensionSpec::from_axes({"religion"}), rollup()); });
    CHECK(err.code() == ErrorCode::SchemaError);
}

TEST_CASE("file loading records a digest") {
    auto m = mapping({{"country", "country"}, {"gender", "gender"}, {"age_group", "age_group"}});
    auto data = load_survey(testing::fixture("survey.csv"), m, &rollup());
    CHECK(data.n_total == 240);
    CHECK(data.source_digest.size() == 64);
    CHECK(data.source_digest == load_survey(testing::fixture("survey.csv"), m, &rollup()).source_digest);
}

TEST_CASE("no usable rows") {
    auto m = mapping({{"gender", "gender"}});
    m.domains["gender"] = {"female"};
    m.strict = false;
    CHECK(error_of([&] { parse_survey(parse_csv("gender\nx\n"), m); }).code() == ErrorCode::EmptySample);
}

}  // TEST_SUITE
