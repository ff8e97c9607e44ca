#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "smi/csv.hpp"
#include "smi/error.hpp"
#include "smi/ingest.hpp"

namespace smi::ingest {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

constexpr std::string_view kHeader =
    "event_id\tuser_id\ttimestamp\tlatitude\tlongitude\tresolution\tplace_type";

}  // namespace

void write_event_store(std::ostream& out, const std::vector<GeoEvent>& events,
                       const IngestCounters& counters) {
  out << kEventStoreMagic << '\n';
  out << "# counters lines=" << counters.lines << " emitted=" << counters.emitted;
  for (SkipReason reason : kSkipReasons) {
    auto it = counters.skipped.find(reason);
    out << ' ' << to_string(reason) << '=' << (it == counters.skipped.end() ? 0 : it->second);
  }
  out << '\n' << kHeader << '\n';
  for (const GeoEvent& e : events) {
    out << e.event_id << '\t' << e.user_id << '\t' << format_instant(e.timestamp) << '\t'
        << csv::format_double(e.latitude) << '\t' << csv::format_double(e.longitude) << '\t'
        << to_string(e.resolution) << '\t' << (e.place_type ? to_string(*e.place_type) : "")
        << '\n';
  }
}

void write_event_store(const std::string& path, const std::vector<GeoEvent>& events,
                       const IngestCounters& counters) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write event store " + path);
  write_event_store(out, events, counters);
  if (!out) throw DataError("error writing event store " + path);
}

EventStore read_event_store(std::istream& in, std::string_view source) {
  const std::string where(source);
  std::string line;
  if (!std::getline(in, line) || line != kEventStoreMagic) {
    throw DataError(where + ": not an event store (expected '" + std::string(kEventStoreMagic) +
                    "')");
  }
  EventStore store;
  if (!std::getline(in, line) || line.rfind("# counters ", 0) != 0) {
    throw DataError(where + ": missing counters line");
  }
  {
    std::istringstream fields(line.substr(11));
    std::string kv;
    while (fields >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw DataError(where + ": bad counter '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const auto value = static_cast<std::size_t>(csv::parse_int(kv.substr(eq + 1), key));
      if (key == "lines") {
        store.counters.lines = value;
      } else if (key == "emitted") {
        store.counters.emitted = value;
      } else {
        bool known = false;
        for (SkipReason reason : kSkipReasons) {
          if (to_string(reason) == key) {
            if (value) store.counters.skipped[reason] = value;
            known = true;
          }
        }
        if (!known) throw DataError(where + ": unknown counter '" + key + "'");
      }
    }
  }
  if (!std::getline(in, line) || line != kHeader) throw DataError(where + ": bad header row");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 7) throw DataError(where + ": malformed event row");
    GeoEvent e;
    e.event_id = std::string(f[0]);
    e.user_id = std::string(f[1]);
    const auto ts = parse_timestamp(f[2]);
    if (!ts) throw DataError(where + ": bad timestamp '" + std::string(f[2]) + "'");
    e.timestamp = *ts;
    e.latitude = csv::parse_double(f[3], "latitude");
    e.longitude = csv::parse_double(f[4], "longitude");
    if (f[5] == "exact_coordinates") {
      e.resolution = Resolution::exact_coordinates;
    } else if (f[5] == "place_center") {
      e.resolution = Resolution::place_center;
    } else {
      throw DataError(where + ": bad resolution '" + std::string(f[5]) + "'");
    }
    if (!f[6].empty()) {
      e.place_type = parse_place_type(f[6]);
      if (!e.place_type) throw DataError(where + ": bad place_type");
    }
    store.events.push_back(std::move(e));
  }
  return store;
}

EventStore read_event_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open event store " + path);
  return read_event_store(in, path);
}

}  // namespace smi::ingest
