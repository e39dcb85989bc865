#include <sstream>

#include <gtest/gtest.h>

#include "quadftc/report.hpp"
#include "quadftc/scenario.hpp"
#include "quadftc/simulation.hpp"
#include "quadftc/telemetry.hpp"

using namespace quadftc;

namespace {

ScenarioConfig short_scenario() {
  ScenarioConfig c = default_scenario();
  c.integrator.t_end = 0.5;
  return c;
}

std::string to_csv(const Telemetry& tel) {
  std::ostringstream os;
  write_telemetry(os, tel);
  return os.str();
}

}  // namespace

TEST(Telemetry, HeaderIsFrozen) {
  EXPECT_EQ(telemetry_header(),
            "t,x,y,z,phi,theta,psi,xd,yd,zd,phid,thetad,psid,U1,U2,U3,U4,w1c,w2c,w3c,w4c,w1a,w2a,w3a,w4a,"
            "s_z,s_phi,s_theta,s_psi,k1,k2,k3,k4,clamped");
  const auto csv = to_csv({});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "# quadftc-telemetry v1");
}

TEST(Telemetry, RoundTripsExactly) {
  const auto tel = simulate(short_scenario());
  const auto table = TelemetryTable::from_records(tel);
  ASSERT_EQ(table.rows(), tel.size());
  for (std::size_t i = 0; i < tel.size(); ++i) {
    const auto fields = record_fields(tel[i]);
    for (std::size_t c = 0; c < kTelemetryColumns.size(); ++c) {
      ASSERT_EQ(table.column(kTelemetryColumns[c])[i], fields[c]) << kTelemetryColumns[c] << " row " << i;
    }
  }
}

TEST(Telemetry, DeterministicBytes) {
  EXPECT_EQ(to_csv(simulate(short_scenario())), to_csv(simulate(short_scenario())));
}

TEST(Telemetry, RejectsUnknownVersion) {
  std::istringstream in("# quadftc-telemetry v2\n" + telemetry_header() + "\n");
  try {
    TelemetryTable::parse(in);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "<telemetry>");
  }
}

TEST(Telemetry, ListsMissingColumns) {
  std::istringstream in("# quadftc-telemetry v1\nt,x,y,z\n0,0,0,0\n");
  try {
    TelemetryTable::parse(in);
    FAIL();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("missing columns"), std::string::npos);
    EXPECT_NE(what.find("phi"), std::string::npos);
    EXPECT_NE(what.find("clamped"), std::string::npos);
    EXPECT_EQ(what.find(" x,"), std::string::npos);
  }
}

TEST(Telemetry, RejectsMalformedRows) {
  std::istringstream short_row("# quadftc-telemetry v1\n" + telemetry_header() + "\n1,2,3\n");
  EXPECT_THROW(TelemetryTable::parse(short_row), ConfigError);
  std::string row = "x";
  for (std::size_t i = 1; i < kTelemetryColumns.size(); ++i) row += ",0";
  std::istringstream bad_number("# quadftc-telemetry v1\n" + telemetry_header() + "\n" + row + "\n");
  EXPECT_THROW(TelemetryTable::parse(bad_number), ConfigError);
}

TEST(Telemetry, AcceptsCrlf) {
  const auto csv = to_csv(simulate(short_scenario()));
  std::string crlf;
  for (char ch : csv) {
    if (ch == '\n') crlf += '\r';
    crlf += ch;
  }
  std::istringstream in(crlf);
  EXPECT_EQ(TelemetryTable::parse(in).rows(), 501u);
}

TEST(Report, RowOrderAndConstantHover) {
  ScenarioConfig c = default_scenario();
  c.integrator.t_end = 2.0;
  for (auto& r : c.references.channel) r.amplitude = 0.0;
  c.initial_state = initial_state_from(c.references);
  const auto table = analyze(TelemetryTable::from_records(simulate(c)), c.references);
  EXPECT_EQ(table[0].name, "roll");
  EXPECT_EQ(table[1].name, "pitch");
  EXPECT_EQ(table[2].name, "yaw");
  EXPECT_EQ(table[3].name, "altitude");
  EXPECT_EQ(table[3].metrics.overshoot, 0.0);
  EXPECT_EQ(*table[3].metrics.settling_time, 0.0);
  const auto json = to_json(table);
  ASSERT_EQ(json.size(), 4u);
  EXPECT_EQ(json[3]["channel"], "altitude");
  EXPECT_TRUE(json[0].contains("control_total_variation"));
}
