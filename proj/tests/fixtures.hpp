// Hand-built flight fixture: 12 flights over 3 entry points, both daily
// windows, queue times worked out by hand (minutes in the comments).
#pragma once

#include <map>
#include <string>
#include <vector>

namespace fixtures {

// entry point  approach(min)  min(entry pt)  queue(min)
// LOGAN  BA101 20  20  0      BA102 30 -> 10     BA103 40 -> 20   BA104 39:59 -> 19:59
// ALESO  AF201 15  15  0      AF202 30 -> 15     AF203 30 -> 15   AF204 45 -> 30
// NUGRA  LH301 25  25  0      LH302 59:59 -> 34:59   LH303 30 -> 5   LH304 45 -> 20
inline const char* kTwelveFlightsCsv =
    "flight_id,entry_point,entry_epoch,landing_epoch\n"
    "BA101,LOGAN,2010-07-20T06:10:00,2010-07-20T06:30:00\n"
    "BA102,LOGAN,2010-07-20T06:40:00,2010-07-20T07:10:00\n"
    "BA103,LOGAN,2010-07-21T16:05:00,2010-07-21T16:45:00\n"
    "BA104,LOGAN,2010-07-21T19:20:00,2010-07-21T19:59:59\n"
    "AF201,ALESO,2010-07-22T06:00:00,2010-07-22T06:15:00\n"
    "AF202,ALESO,2010-07-22T06:50:00,2010-07-22T07:20:00\n"
    "AF203,ALESO,2010-07-20T16:30:00,2010-07-20T17:00:00\n"
    "AF204,ALESO,2010-07-20T18:00:00,2010-07-20T18:45:00\n"
    "LH301,NUGRA,2010-07-21T09:00:00,2010-07-21T09:25:00\n"
    "LH302,NUGRA,2010-07-21T09:30:00,2010-07-21T10:29:59\n"
    "LH303,NUGRA,2010-07-22T17:10:00,2010-07-22T17:40:00\n"
    "LH304,NUGRA,2010-07-22T19:00:00,2010-07-22T19:45:00\n";

// flight id -> queue time in seconds
inline const std::map<std::string, double>& expected_queue_seconds() {
  static const std::map<std::string, double> expected{
      {"BA101", 0.0},    {"BA102", 600.0},  {"BA103", 1200.0}, {"BA104", 1199.0},
      {"AF201", 0.0},    {"AF202", 900.0},  {"AF203", 900.0},  {"AF204", 1800.0},
      {"LH301", 0.0},    {"LH302", 2099.0}, {"LH303", 300.0},  {"LH304", 1200.0}};
  return expected;
}

}  // namespace fixtures
