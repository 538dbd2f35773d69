/**
 * @file midi.cpp
 * @brief SMF writer and reader.
 */

#include "popgen/midi.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>
#include <tuple>
#include <utility>

#include "io_util.h"
#include "popgen/error.h"

namespace popgen {

namespace {

struct RawEvent {
  int64_t tick = 0;
  int order = 0;  ///< 0 meta, 1 note-off, 2 note-on
  int pitch = 0;
  std::vector<uint8_t> bytes;
};

void put_u16(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<uint8_t>(v >> shift));
}

void put_vlq(std::vector<uint8_t>& out, uint64_t v) {
  uint8_t buf[10];
  int len = 0;
  buf[len++] = static_cast<uint8_t>(v & 0x7F);
  while ((v >>= 7) != 0) buf[len++] = static_cast<uint8_t>((v & 0x7F) | 0x80);
  while (len > 0) out.push_back(buf[--len]);
}

RawEvent meta(int type, std::vector<uint8_t> data) {
  RawEvent e;
  e.bytes = {0xFF, static_cast<uint8_t>(type)};
  put_vlq(e.bytes, data.size());
  e.bytes.insert(e.bytes.end(), data.begin(), data.end());
  return e;
}

void append_track(std::vector<uint8_t>& out, std::vector<RawEvent> events) {
  std::stable_sort(events.begin(), events.end(), [](const RawEvent& a, const RawEvent& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    if (a.order != b.order) return a.order < b.order;
    return a.pitch < b.pitch;
  });
  std::vector<uint8_t> body;
  int64_t last = 0;
  for (const RawEvent& e : events) {
    put_vlq(body, static_cast<uint64_t>(e.tick - last));
    last = e.tick;
    body.insert(body.end(), e.bytes.begin(), e.bytes.end());
  }
  body.insert(body.end(), {0x00, 0xFF, 0x2F, 0x00});
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  put_u32(out, static_cast<uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
}

std::vector<RawEvent> note_events(std::span<const MidiNote> notes) {
  std::vector<RawEvent> events;
  for (const MidiNote& n : notes) {
    RawEvent on;
    on.tick = n.start_tick;
    on.order = 2;
    on.pitch = n.pitch;
    on.bytes = {static_cast<uint8_t>(0x90 | n.channel), static_cast<uint8_t>(n.pitch),
                static_cast<uint8_t>(n.velocity)};
    RawEvent off;
    off.tick = n.end_tick;
    off.order = 1;
    off.pitch = n.pitch;
    off.bytes = {static_cast<uint8_t>(0x80 | n.channel), static_cast<uint8_t>(n.pitch), 0};
    events.push_back(std::move(on));
    events.push_back(std::move(off));
  }
  return events;
}

RawEvent track_name(const std::string& name) { return meta(0x03, std::vector<uint8_t>(name.begin(), name.end())); }

class Cursor {
 public:
  Cursor(std::span<const uint8_t> bytes, std::size_t pos, std::size_t end) : bytes_(bytes), pos_(pos), end_(end) {}

  bool done() const { return pos_ >= end_; }
  std::size_t pos() const { return pos_; }

  uint8_t peek() const {
    need(1);
    return bytes_[pos_];
  }
  uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  uint32_t u16() {
    const uint32_t hi = u8();
    return (hi << 8) | u8();
  }
  uint32_t u32() {
    const uint32_t hi = u16();
    return (hi << 16) | u16();
  }
  uint64_t vlq() {
    uint64_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return v;
    }
    throw Error(ErrorCode::FormatError, "variable-length quantity longer than 4 bytes");
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  std::span<const uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > end_) throw Error(ErrorCode::FormatError, "unexpected end of MIDI data");
  }

  std::span<const uint8_t> bytes_;
  std::size_t pos_;
  std::size_t end_;
};

MidiTrack parse_track(Cursor& cur, MidiFile& file, bool& tempo_seen, bool& metre_seen) {
  MidiTrack track;
  std::map<std::pair<int, int>, std::deque<std::pair<int64_t, int>>> open;
  int64_t tick = 0;
  uint8_t status = 0;
  while (!cur.done()) {
    tick += static_cast<int64_t>(cur.vlq());
    uint8_t b = cur.peek();
    if (b & 0x80) {
      cur.u8();
      status = b;
    } else if (status == 0 || status >= 0xF0) {
      throw Error(ErrorCode::FormatError, "running status without a prior channel message");
    }
    if (status == 0xFF) {
      const uint8_t type = cur.u8();
      const auto len = static_cast<std::size_t>(cur.vlq());
      const auto data = cur.take(len);
      if (type == 0x2F) break;
      if (type == 0x03) track.name.assign(data.begin(), data.end());
      if (type == 0x51 && len == 3 && !tempo_seen) {
        const uint32_t us = (uint32_t{data[0]} << 16) | (uint32_t{data[1]} << 8) | data[2];
        if (us > 0) file.tempo_bpm = 60'000'000.0 / us;
        tempo_seen = true;
      }
      if (type == 0x58 && len >= 2 && !metre_seen) {
        file.beats_per_bar = data[0];
        metre_seen = true;
      }
      status = 0;
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      cur.skip(static_cast<std::size_t>(cur.vlq()));
      status = 0;
      continue;
    }
    const int kind = status & 0xF0;
    const int channel = status & 0x0F;
    const int data_len = (kind == 0xC0 || kind == 0xD0) ? 1 : 2;
    const uint8_t d1 = cur.u8();
    const uint8_t d2 = data_len == 2 ? cur.u8() : 0;
    if ((d1 | d2) & 0x80) throw Error(ErrorCode::FormatError, "data byte with the high bit set");
    const bool on = kind == 0x90 && d2 > 0;
    const bool off = kind == 0x80 || (kind == 0x90 && d2 == 0);
    if (on) {
      open[{channel, d1}].push_back({tick, d2});
    } else if (off) {
      auto& q = open[{channel, d1}];
      if (!q.empty()) {
        track.notes.push_back({channel, d1, q.front().second, q.front().first, tick});
        q.pop_front();
      }
    }
  }
  for (auto& [key, q] : open) {
    for (const auto& [start, vel] : q) track.notes.push_back({key.first, key.second, vel, start, tick});
  }
  std::sort(track.notes.begin(), track.notes.end(), [](const MidiNote& a, const MidiNote& b) {
    return std::tie(a.start_tick, a.pitch, a.channel, a.end_tick) <
           std::tie(b.start_tick, b.pitch, b.channel, b.end_tick);
  });
  return track;
}

}  // namespace

std::vector<MidiNote> track_notes(const MelodyTrack& track, int channel, int velocity) {
  std::vector<MidiNote> notes;
  for (int onset : onset_steps(track)) {
    const int len = note_length(track, onset);
    notes.push_back({channel, track.steps[static_cast<std::size_t>(onset)].midi(), velocity,
                     int64_t{onset} * kTicksPerStep, int64_t{onset + len} * kTicksPerStep});
  }
  return notes;
}

std::vector<MidiNote> track_notes(const PolyTrack& track, int channel, int velocity) {
  std::vector<MidiNote> notes;
  for (int i = 0; i < track.length(); ++i) {
    for (const PolyEvent& e : track.steps[static_cast<std::size_t>(i)]) {
      if (!e.onset) continue;
      int end = i + 1;
      while (end < track.length()) {
        const auto& next = track.steps[static_cast<std::size_t>(end)];
        const bool held = std::any_of(next.begin(), next.end(),
                                      [&](const PolyEvent& x) { return x.midi == e.midi && !x.onset; });
        if (!held) break;
        ++end;
      }
      notes.push_back({channel, e.midi, velocity, int64_t{i} * kTicksPerStep, int64_t{end} * kTicksPerStep});
    }
  }
  std::sort(notes.begin(), notes.end());
  return notes;
}

namespace {

uint32_t tempo_micros(double tempo_bpm) {
  if (!(tempo_bpm > 0.0) || !std::isfinite(tempo_bpm)) {
    throw Error(ErrorCode::InvalidParams, "tempo must be positive");
  }
  const auto us = std::lround(60'000'000.0 / tempo_bpm);
  if (us <= 0 || us > 0xFFFFFF) throw Error(ErrorCode::InvalidParams, "tempo out of MIDI range");
  return static_cast<uint32_t>(us);
}

std::vector<uint8_t> header(int tracks) {
  std::vector<uint8_t> out = {'M', 'T', 'h', 'd'};
  put_u32(out, 6);
  put_u16(out, 1);
  put_u16(out, static_cast<uint32_t>(tracks));
  put_u16(out, kTicksPerQuarter);
  return out;
}

void add_timing(std::vector<RawEvent>& events, uint32_t us, Meter meter) {
  events.push_back(meta(0x51, {static_cast<uint8_t>(us >> 16), static_cast<uint8_t>(us >> 8), static_cast<uint8_t>(us)}));
  events.push_back(meta(0x58, {static_cast<uint8_t>(meter.beats_per_bar), 2, 24, 8}));
}

}  // namespace

std::vector<uint8_t> render_midi(const Arrangement& arrangement, double tempo_bpm) {
  validate(arrangement);
  const uint32_t us = tempo_micros(tempo_bpm);
  std::vector<uint8_t> out = header(3);

  std::vector<RawEvent> lead = note_events(track_notes(arrangement.lead, 0, 80));
  lead.push_back(track_name("lead"));
  add_timing(lead, us, arrangement.meter);
  append_track(out, std::move(lead));

  std::vector<RawEvent> right = note_events(track_notes(arrangement.right_hand, 1, 64));
  right.push_back(track_name("right hand"));
  append_track(out, std::move(right));

  std::vector<RawEvent> left = note_events(track_notes(arrangement.left_hand, 2, 64));
  left.push_back(track_name("left hand"));
  append_track(out, std::move(left));
  return out;
}

std::vector<uint8_t> render_track_midi(const MelodyTrack& track, double tempo_bpm, int channel, int velocity) {
  validate(track);
  if (channel < 0 || channel > 15 || velocity < 1 || velocity > 127) {
    throw Error(ErrorCode::InvalidParams, "channel or velocity out of MIDI range");
  }
  const uint32_t us = tempo_micros(tempo_bpm);
  std::vector<uint8_t> out = header(1);
  std::vector<RawEvent> events = note_events(track_notes(track, channel, velocity));
  events.push_back(track_name("melody"));
  add_timing(events, us, track.meter);
  append_track(out, std::move(events));
  return out;
}

void export_midi(const Arrangement& arrangement, const std::filesystem::path& path, double tempo_bpm) {
  const std::vector<uint8_t> bytes = render_midi(arrangement, tempo_bpm);
  detail::write_file(path, std::string(bytes.begin(), bytes.end()));
}

MidiFile parse_midi(std::span<const uint8_t> bytes) {
  Cursor head(bytes, 0, bytes.size());
  const auto magic = head.take(4);
  if (!std::equal(magic.begin(), magic.end(), "MThd")) throw Error(ErrorCode::FormatError, "missing MThd header");
  const uint32_t header_len = head.u32();
  if (header_len < 6) throw Error(ErrorCode::FormatError, "short MThd header");
  MidiFile file;
  file.format = static_cast<int>(head.u16());
  const uint32_t ntracks = head.u16();
  const uint32_t division = head.u16();
  if (division & 0x8000) throw Error(ErrorCode::FormatError, "SMPTE time division is not supported");
  if (division == 0) throw Error(ErrorCode::FormatError, "zero ticks per quarter");
  file.ticks_per_quarter = static_cast<int>(division);
  head.skip(header_len - 6);

  bool tempo_seen = false;
  bool metre_seen = false;
  std::size_t pos = head.pos();
  for (uint32_t t = 0; t < ntracks; ++t) {
    Cursor chunk(bytes, pos, bytes.size());
    const auto id = chunk.take(4);
    const uint32_t len = chunk.u32();
    const std::size_t start = chunk.pos();
    if (start + len > bytes.size()) throw Error(ErrorCode::FormatError, "track chunk overruns file");
    pos = start + len;
    if (!std::equal(id.begin(), id.end(), "MTrk")) {
      --t;
      continue;
    }
    Cursor body(bytes, start, start + len);
    file.tracks.push_back(parse_track(body, file, tempo_seen, metre_seen));
  }
  return file;
}

MidiFile read_midi(const std::filesystem::path& path) {
  const std::string raw = detail::read_file(path);
  return parse_midi(std::span(reinterpret_cast<const uint8_t*>(raw.data()), raw.size()));
}

MelodyTrack notes_to_melody(std::span<const MidiNote> notes, int ticks_per_quarter, Meter meter, int min_steps) {
  if (ticks_per_quarter <= 0) throw Error(ErrorCode::InvalidParams, "ticks per quarter must be positive");
  const double ticks_per_step = static_cast<double>(ticks_per_quarter) / kStepsPerBeat;
  auto to_step = [&](int64_t tick) { return static_cast<int>(std::llround(static_cast<double>(tick) / ticks_per_step)); };

  int total = min_steps;
  for (const MidiNote& n : notes) total = std::max(total, to_step(n.end_tick));
  if (total <= 0) throw Error(ErrorCode::EmptyTrack, "no notes to convert");

  // pitch and start step of the note owning each step
  std::vector<std::pair<int, int>> owner(static_cast<std::size_t>(total), {-1, -1});
  for (const MidiNote& n : notes) {
    const int start = to_step(n.start_tick);
    const int end = std::max(start + 1, to_step(n.end_tick));
    for (int s = start; s < end && s < total; ++s) {
      auto& o = owner[static_cast<std::size_t>(s)];
      if (n.pitch > o.first || (n.pitch == o.first && start > o.second)) o = {n.pitch, start};
    }
  }
  MelodyTrack track;
  track.meter = meter;
  for (int s = 0; s < total; ++s) {
    const auto& o = owner[static_cast<std::size_t>(s)];
    if (o.first < 0) {
      track.steps.push_back(StepState::silence());
    } else if (s > 0 && owner[static_cast<std::size_t>(s - 1)] == o) {
      track.steps.push_back(StepState::sustain());
    } else {
      track.steps.push_back(StepState::pitch(o.first));
    }
  }
  return track;
}

}  // namespace popgen
