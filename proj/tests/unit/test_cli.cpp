#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <sys/wait.h>

#include "commands.hpp"
#include "csv.hpp"
#include "synth.hpp"

using namespace gfpcli;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_all(const std::string& text) {
    std::istringstream in(text);
    CsvReader r(in);
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> f;
    while (r.next(f)) out.push_back(f);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GFP_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("gfp_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("csv reader handles quoting, CRLF and blank lines") {
    const auto rows = read_all("a,b,c\r\n\"x,1\",\"he said \"\"hi\"\"\",\r\n\r\n\"multi\nline\",2,3\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1] == std::vector<std::string>{"x,1", "he said \"hi\"", ""});
    CHECK(rows[2] == std::vector<std::string>{"multi\nline", "2", "3"});

    std::string out;
    append_field(out, "plain");
    out.push_back(',');
    append_field(out, "a,\"b\"");
    CHECK(out == "plain,\"a,\"\"b\"\"\"");
}

TEST_CASE("number and timestamp parsing") {
    CHECK(parse_int("42") == 42);
    CHECK(parse_int(" 42 ") == 42);
    CHECK_FALSE(parse_int("4.2").has_value());
    CHECK_FALSE(parse_int("").has_value());
    CHECK(parse_double("12.50") == 12.5);
    CHECK_FALSE(parse_double("abc").has_value());
    CHECK(parse_iso_timestamp("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso_timestamp("2022-09-01 00:15") == 1661991300);
    CHECK(parse_iso_timestamp("2022/09/01 00:15") == 1661991300);
    CHECK(parse_iso_timestamp("2000-03-01") == 951868800);
    CHECK_FALSE(parse_iso_timestamp("2022-13-01").has_value());
    CHECK_FALSE(parse_iso_timestamp("yesterday").has_value());
}

TEST_CASE("transaction reader flags malformed rows and keeps the count") {
    std::istringstream in(
        "\xEF\xBB\xBF"
        "Timestamp,EdgeID,SourceAccountId,DestAccountId,Amount\n"
        "10,e1,a,b,1.5\n"
        "oops,e2,a,b,1\n"
        "12,e3,a\n"
        "13,e4,b,a,\n");
    TransactionReader reader(in, ColumnNames{}, false);
    RowBlock block;
    CHECK(reader.read(block, 100) == 4);
    CHECK(block.rows() == 4);
    CHECK(block.status == std::vector<std::int32_t>{GFP_ROW_OK, GFP_ROW_MALFORMED, GFP_ROW_MALFORMED,
                                                    GFP_ROW_MALFORMED});
    CHECK(block.timestamps[0] == 10);
    CHECK(block.attributes[0] == 1.5);
    CHECK(reader.malformed_rows() == 3);

    std::istringstream missing("EdgeID,SourceAccountId\n1,a\n");
    CHECK_THROWS_AS(TransactionReader(missing, ColumnNames{}, false), DataError);
}

TEST_CASE("column names come from the config input schema") {
    const auto names = ColumnNames::from_config_json(
        R"({"input_schema": {"edge_id": "id", "source": "from", "target": "to", "timestamp": "when",
            "attributes": ["Amount"]}})");
    CHECK(names.edge_id == "id");
    CHECK(names.source == "from");
    CHECK(names.timestamp == "when");
    CHECK(names.attributes == std::vector<std::string>{"Amount"});
}

TEST_CASE("number formatting") {
    std::string s;
    append_number(s, 3.0, true);
    s.push_back(' ');
    append_number(s, 0.1, false);
    s.push_back(' ');
    append_number(s, 1661991300.0, true);
    CHECK(s == "3 0.1 1661991300");
}

TEST_CASE("generator is reproducible and truthful about its counts") {
    SynthOptions o;
    o.edges = 3000;
    o.seed = 11;
    std::ostringstream a, b;
    const auto ta = generate_stream(o, a);
    const auto tb = generate_stream(o, b);
    CHECK(a.str() == b.str());
    CHECK(ta.to_json(o) == tb.to_json(o));
    CHECK(count_lines(a.str()) == 3001);
    CHECK(ta.background_edges + ta.motif_edges == 3000);

    // Planted cycles and scatter-gathers account for every motif edge.
    std::uint64_t motif = 0;
    for (const auto& [len, n] : ta.planted_cycles) motif += static_cast<std::uint64_t>(len) * n;
    for (const auto& [k, n] : ta.planted_scatter_gather) motif += 2 * static_cast<std::uint64_t>(k) * n;
    CHECK(motif <= ta.motif_edges);

    const auto rows = read_all(a.str());
    std::int64_t prev = -1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto t = *parse_int(rows[i][3]);
        CHECK(t > prev);
        prev = t;
    }
    const auto j = nlohmann::json::parse(ta.to_json(o));
    CHECK(j["motif_edge_prefix"] == "m");
    CHECK(j["expected"]["simple_cycle"] == j["planted"]["cycles"]);

    std::ostringstream empty;
    SynthOptions none = o;
    none.edges = 0;
    const auto tn = generate_stream(none, empty);
    CHECK(count_lines(empty.str()) == 1);
    CHECK(tn.motif_edges == 0);

    std::ostringstream other;
    o.seed = 12;
    generate_stream(o, other);
    CHECK(other.str() != a.str());
}

TEST_CASE("binary: exit codes, row conservation and batching") {
    TempDir dir;
    REQUIRE(run_cli("gen --pattern mixed --edges 1000 --seed 3 --output " + dir / "in.csv" + " --truth " +
                    dir / "truth.json") == 0);
    REQUIRE(run_cli("transform -i " + dir / "in.csv" + " -o " + dir / "out.csv" + " -b 128 --report " +
                    dir / "report.json") == 0);
    const auto out = slurp(dir / "out.csv");
    CHECK(count_lines(out) == 1001);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["rows"] == 1000);
    CHECK(report["batches"] == 8);
    CHECK(report["row_status_counts"]["ok"] == 1000);

    // A later batch reaching back in time is counted, not rejected.
    {
        std::ofstream f(dir / "regress.csv");
        f << "EdgeID,SourceAccountId,DestAccountId,Timestamp,Amount\n"
          << "1,a,b,100,1\n2,b,c,101,1\n3,c,a,50,1\n";
    }
    REQUIRE(run_cli("transform -i " + dir / "regress.csv" + " -b 2 -o " + dir / "r.csv" + " --report " +
                    dir / "r.json") == 0);
    const auto regress = nlohmann::json::parse(slurp(dir / "r.json"));
    CHECK(regress["out_of_order_batches"] == 1);
    CHECK(regress["row_status_counts"]["ok"] == 3);

    // Empty history still yields a usable state.
    {
        std::ofstream(dir / "empty.csv") << "EdgeID,SourceAccountId,DestAccountId,Timestamp,Amount\n";
    }
    REQUIRE(run_cli("fit -i " + dir / "empty.csv" + " -s " + dir / "state.bin") == 0);
    REQUIRE(run_cli("transform -i " + dir / "empty.csv" + " -s " + dir / "state.bin" + " -o " + dir / "e.csv") ==
            0);
    CHECK(count_lines(slurp(dir / "e.csv")) == 1);

    CHECK(run_cli("") == kExitUsage);
    CHECK(run_cli("transform --bogus") == kExitUsage);
    CHECK(run_cli("gen --pattern spirals") == kExitUsage);
    CHECK(run_cli("transform -i " + dir / "missing.csv") == kExitIo);
    {
        std::ofstream(dir / "bad.json") << "{\"worker_count\": 0}";
        std::ofstream(dir / "noheader.csv") << "a,b\n";
    }
    CHECK(run_cli("transform -i " + dir / "in.csv" + " -c " + dir / "bad.json") == kExitConfig);
    CHECK(run_cli("transform -i " + dir / "noheader.csv" + " -o " + dir / "x.csv") == kExitData);
    CHECK(run_cli("transform -i " + dir / "in.csv" + " -s " + dir / "in.csv") == kExitData);
}

}  // TEST_SUITE
