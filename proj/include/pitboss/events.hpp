#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pitboss/cards.hpp"

namespace pitboss {

using nlohmann::json;

/// Detection-stream schema. One JSON object per line:
///   header   {"event":"stream_header","schema":1,"fps":10}
///   control  {"event":"hand_start","index":5,"ts":0,"hand_id":"s1:h0","shuffle":true}
///            {"event":"hand_end","index":210,"ts":20500,"hand_id":"s1:h0"}
///   frame    {"index":6,"ts":0,"viewpoint":"overhead","camera":"cam-top",
///             "objects":[{"kind":"card",...},{"kind":"chip_stack",...}]}
/// Frames and controls share one monotone index sequence so arrival order can
/// be reconstructed after transport reordering.

inline constexpr int kStreamSchema = 1;

struct CardObject {
  Rank rank = 0;  // 0 means the detector could not read the face
  bool horizontal = false;
  std::string location;  // "p3", "p3a", "p3b", "dealer"
  std::array<int, 4> bbox{};
  double conf = 0;
};

struct ChipObject {
  std::string color;
  int count = 0;
  std::string bet_area;  // "p3_main", "p3_side"
  std::array<int, 4> bbox{};
  double conf = 0;
};

struct StreamHeader {
  int schema = kStreamSchema;
  int fps = 10;
};

struct FrameEvent {
  std::uint64_t index = 0;
  std::int64_t ts = 0;  // milliseconds from session start
  std::string viewpoint;  // "overhead" or "chipboard"
  std::string camera;
  std::vector<CardObject> cards;
  std::vector<ChipObject> chips;
};

struct ControlEvent {
  std::uint64_t index = 0;
  std::int64_t ts = 0;
  std::string event;  // "hand_start" or "hand_end"
  std::string hand_id;
  bool shuffle = false;  // hand_start only
};

using StreamItem = std::variant<StreamHeader, ControlEvent, FrameEvent>;

inline json to_json(const CardObject& c) {
  return json{{"kind", "card"},
              {"rank", c.rank},
              {"orientation", c.horizontal ? "horizontal" : "vertical"},
              {"location", c.location},
              {"bbox", c.bbox},
              {"conf", c.conf}};
}

inline json to_json(const ChipObject& c) {
  return json{{"kind", "chip_stack"},
              {"color", c.color},
              {"count", c.count},
              {"bet_area", c.bet_area},
              {"bbox", c.bbox},
              {"conf", c.conf}};
}

inline json to_json(const StreamItem& item) {
  if (const auto* h = std::get_if<StreamHeader>(&item))
    return json{{"event", "stream_header"}, {"schema", h->schema}, {"fps", h->fps}};
  if (const auto* c = std::get_if<ControlEvent>(&item)) {
    json out{{"event", c->event},
             {"index", c->index},
             {"ts", c->ts},
             {"hand_id", c->hand_id}};
    if (c->event == "hand_start") out["shuffle"] = c->shuffle;
    return out;
  }
  const auto& f = std::get<FrameEvent>(item);
  json objects = json::array();
  for (const auto& c : f.cards) objects.push_back(to_json(c));
  for (const auto& c : f.chips) objects.push_back(to_json(c));
  return json{{"index", f.index},
              {"ts", f.ts},
              {"viewpoint", f.viewpoint},
              {"camera", f.camera},
              {"objects", objects}};
}

inline std::string stream_line(const StreamItem& item) { return to_json(item).dump(); }

inline CardObject card_from_json(const json& j) {
  CardObject c;
  c.rank = j.at("rank").get<Rank>();
  if (c.rank > 13) throw std::runtime_error("card object: rank out of range");
  const std::string orient = j.at("orientation").get<std::string>();
  if (orient != "vertical" && orient != "horizontal")
    throw std::runtime_error("card object: bad orientation " + orient);
  c.horizontal = orient == "horizontal";
  c.location = j.at("location").get<std::string>();
  const auto& bbox = j.at("bbox");
  if (!bbox.is_array() || bbox.size() != 4)
    throw std::runtime_error("card object: bbox must have 4 entries");
  for (int i = 0; i < 4; ++i) c.bbox[i] = bbox[i].get<int>();
  c.conf = j.value("conf", 0.0);
  return c;
}

inline ChipObject chip_from_json(const json& j) {
  ChipObject c;
  c.color = j.at("color").get<std::string>();
  c.count = j.at("count").get<int>();
  if (c.count < 0) throw std::runtime_error("chip object: negative count");
  c.bet_area = j.at("bet_area").get<std::string>();
  const auto& bbox = j.at("bbox");
  if (!bbox.is_array() || bbox.size() != 4)
    throw std::runtime_error("chip object: bbox must have 4 entries");
  for (int i = 0; i < 4; ++i) c.bbox[i] = bbox[i].get<int>();
  c.conf = j.value("conf", 0.0);
  return c;
}

inline StreamItem stream_item_from_json(const json& j) {
  if (j.contains("event")) {
    const std::string event = j.at("event").get<std::string>();
    if (event == "stream_header") {
      StreamHeader h;
      h.schema = j.at("schema").get<int>();
      h.fps = j.value("fps", 10);
      return h;
    }
    if (event != "hand_start" && event != "hand_end")
      throw std::runtime_error("stream: unknown event " + event);
    ControlEvent c;
    c.event = event;
    c.index = j.at("index").get<std::uint64_t>();
    c.ts = j.at("ts").get<std::int64_t>();
    c.hand_id = j.at("hand_id").get<std::string>();
    c.shuffle = j.value("shuffle", false);
    return c;
  }
  FrameEvent f;
  f.index = j.at("index").get<std::uint64_t>();
  f.ts = j.at("ts").get<std::int64_t>();
  f.viewpoint = j.at("viewpoint").get<std::string>();
  if (f.viewpoint != "overhead" && f.viewpoint != "chipboard")
    throw std::runtime_error("stream: unknown viewpoint " + f.viewpoint);
  f.camera = j.value("camera", "");
  for (const auto& obj : j.at("objects")) {
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "card")
      f.cards.push_back(card_from_json(obj));
    else if (kind == "chip_stack")
      f.chips.push_back(chip_from_json(obj));
    else
      throw std::runtime_error("stream: unknown object kind " + kind);
  }
  return f;
}

inline StreamItem parse_stream_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("stream: bad json: ") + e.what());
  }
  try {
    return stream_item_from_json(j);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("stream: bad item: ") + e.what());
  }
}

inline void write_stream(std::ostream& out, const std::vector<StreamItem>& items) {
  for (const auto& item : items) out << stream_line(item) << '\n';
}

inline void write_stream_file(const std::string& path,
                              const std::vector<StreamItem>& items) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("stream: cannot open " + path);
  write_stream(out, items);
}

}  // namespace pitboss
