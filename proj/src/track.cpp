#include "ttlab/track.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ttlab::track {

namespace {

Corner make_corner(int sw, int i, int j) {
  if (i > j) std::swap(i, j);
  return Corner{sw, i, j};
}

bool structurally_sound(const TrainTrack& t, std::vector<ValidationIssue>* issues) {
  const int v = static_cast<int>(t.switches.size());
  const int e = static_cast<int>(t.branches.size());
  bool ok = true;
  auto bad = [&](const std::string& msg) {
    issues->push_back({Err::MalformedTrack, msg});
    ok = false;
  };
  if (v == 0 || e == 0) {
    bad("empty track");
    return false;
  }
  if (3 * v != 2 * e) {
    bad("slot/end count mismatch: 3V != 2E");
    return false;
  }
  for (int s = 0; s < v; ++s) {
    if (t.switches[s].large_slot < 0 || t.switches[s].large_slot > 2) {
      bad("switch " + std::to_string(s) + " has no large slot designation");
      ok = false;
    }
    for (int k = 0; k < 3; ++k) {
      HalfRef h = t.switches[s].slots[k];
      if (h.branch < 0 || h.branch >= e || (h.end != 0 && h.end != 1)) {
        bad("dangling slot at switch " + std::to_string(s));
        return false;
      }
      SlotRef back = t.branches[h.branch].ends[h.end];
      if (back.sw != s || back.slot != k) {
        bad("slot/end cross-reference mismatch at switch " + std::to_string(s));
        return false;
      }
    }
  }
  for (int b = 0; b < e; ++b) {
    for (int end = 0; end < 2; ++end) {
      SlotRef r = t.branches[b].ends[end];
      if (r.sw < 0 || r.sw >= v || r.slot < 0 || r.slot > 2) {
        bad("dangling end on branch " + std::to_string(b));
        return false;
      }
      HalfRef h = t.switches[r.sw].slots[r.slot];
      if (h.branch != b || h.end != end) {
        bad("end/slot cross-reference mismatch on branch " + std::to_string(b));
        return false;
      }
    }
  }
  // Branch numbers must be exactly 1..p.
  std::vector<bool> seen(e + 1, false);
  for (const auto& br : t.branches) {
    if (br.number < 1 || br.number > e || seen[br.number]) {
      bad("branch numbers are not a permutation of 1..p");
      ok = false;
      break;
    }
    seen[br.number] = true;
  }
  // Connectivity over switches.
  std::vector<bool> visited(v, false);
  std::queue<int> q;
  q.push(0);
  visited[0] = true;
  int count = 1;
  while (!q.empty()) {
    int s = q.front();
    q.pop();
    for (int k = 0; k < 3; ++k) {
      HalfRef h = t.switches[s].slots[k];
      int far = t.branches[h.branch].ends[1 - h.end].sw;
      if (far >= 0 && far < v && !visited[far]) {
        visited[far] = true;
        ++count;
        q.push(far);
      }
    }
  }
  if (count != v) {
    bad("track is disconnected");
    ok = false;
  }
  return ok;
}

int find_face(const std::vector<Face>& faces, const Corner& c) {
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (const auto& k : faces[f].corners) {
      if (k == c) return static_cast<int>(f);
    }
  }
  return -1;
}

}  // namespace

std::vector<Face> trace_faces(const TrainTrack& t) {
  const int e = static_cast<int>(t.branches.size());
  // Directed half-edge (b, end) = the half of b attached at `end`, departing
  // from its switch. Face successor: cross to the far end, then turn to the
  // next slot counterclockwise.
  auto key = [](int b, int end) { return 2 * b + end; };
  std::vector<bool> visited(2 * e, false);
  std::vector<Face> faces;
  for (int b0 = 0; b0 < e; ++b0) {
    for (int e0 = 0; e0 < 2; ++e0) {
      if (visited[key(b0, e0)]) continue;
      Face face;
      int b = b0, end = e0;
      do {
        visited[key(b, end)] = true;
        int fb = b, fe = 1 - end;  // far half
        SlotRef at = t.branches[fb].ends[fe];
        int next_slot = (at.slot + 1) % 3;
        face.corners.push_back(make_corner(at.sw, at.slot, next_slot));
        int large = t.switches[at.sw].large_slot;
        if (at.slot != large && next_slot != large) ++face.cusps;
        HalfRef nh = t.switches[at.sw].slots[next_slot];
        b = nh.branch;
        end = nh.end;
      } while (!(b == b0 && end == e0));
      faces.push_back(std::move(face));
    }
  }
  // Attach puncture marks.
  for (const auto& mark : t.punctured_faces) {
    int f = find_face(faces, mark);
    if (f >= 0) faces[f].punctured = true;
  }
  return faces;
}

ValidationReport validate(const TrainTrack& t) {
  ValidationReport rep;
  if (!structurally_sound(t, &rep.issues)) return rep;
  bool sound = rep.issues.empty();
  if (3 * t.genus - 3 + t.punctures < 2) {
    rep.issues.push_back({Err::ExceptionalSurface,
                          "3g-3+m = " + std::to_string(3 * t.genus - 3 + t.punctures) + " < 2"});
  }
  if (!sound) return rep;

  rep.faces = trace_faces(t);
  rep.euler_char = static_cast<int>(t.switches.size()) - static_cast<int>(t.branches.size()) +
                   static_cast<int>(rep.faces.size());

  // Puncture marks must name pairwise distinct existing faces.
  std::set<int> marked;
  for (const auto& mark : t.punctured_faces) {
    int f = find_face(rep.faces, mark);
    if (f < 0) {
      rep.issues.push_back({Err::MalformedTrack, "puncture mark names no face"});
    } else if (!marked.insert(f).second) {
      rep.issues.push_back({Err::MalformedTrack, "face marked punctured twice"});
    }
  }

  for (std::size_t f = 0; f < rep.faces.size(); ++f) {
    const Face& face = rep.faces[f];
    if (face.punctured) {
      if (face.cusps < 1) {
        rep.issues.push_back(
            {Err::ForbiddenFace, "punctured face " + std::to_string(f) + " has no cusp"});
      }
    } else if (face.cusps < 3) {
      rep.issues.push_back({Err::ForbiddenFace, "face " + std::to_string(f) + " is a disc with " +
                                                    std::to_string(face.cusps) + " cusps"});
    }
  }
  rep.ok = rep.issues.empty();
  return rep;
}

void require_valid(const TrainTrack& t) {
  ValidationReport rep = validate(t);
  if (!rep.ok) {
    if (rep.issues.empty()) fail(Err::MalformedTrack, "invalid track");
    throw Error(rep.issues.front().code, rep.issues.front().detail);
  }
}

std::string TopType::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < disc_degrees.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(disc_degrees[i]);
  }
  out += ";-" + std::to_string(punctures) + ")";
  return out;
}

TopType topological_type(const TrainTrack& t) {
  require_valid(t);
  std::vector<Face> faces = trace_faces(t);
  TopType type;
  type.punctures = t.punctures;
  int punct_count = 0;
  int sum = 0;
  for (const auto& f : faces) {
    if (f.punctured) {
      ++punct_count;
      continue;
    }
    type.disc_degrees.push_back(f.cusps - 2);
    sum += f.cusps - 2;
  }
  std::sort(type.disc_degrees.begin(), type.disc_degrees.end());
  int expected = 4 * t.genus - 4 + t.punctures;
  if (punct_count != t.punctures || sum != expected) {
    fail(Err::TypeSumMismatch, "disc degrees sum to " + std::to_string(sum) + ", expected " +
                                   std::to_string(expected) + " (punctured faces " +
                                   std::to_string(punct_count) + " of " +
                                   std::to_string(t.punctures) + ")");
  }
  return type;
}

std::optional<std::vector<int>> orientation(const TrainTrack& t) {
  require_valid(t);
  const int e = static_cast<int>(t.branches.size());
  // dir[b] = +1 means flow from end 0 to end 1. At a switch the large half
  // points inward exactly when both small halves point outward.
  // inward(b, end) = (dir == +1) XOR (end == 0).
  std::vector<int> dir(e, 0);
  for (int start = 0; start < e; ++start) {
    if (dir[start] != 0) continue;
    dir[start] = 1;
    std::queue<int> q;
    q.push(start);
    while (!q.empty()) {
      int b = q.front();
      q.pop();
      for (int end = 0; end < 2; ++end) {
        SlotRef at = t.branches[b].ends[end];
        const Switch& sw = t.switches[at.sw];
        bool b_large = at.slot == sw.large_slot;
        bool b_inward = (dir[b] == 1) != (end == 0);
        for (int k = 0; k < 3; ++k) {
          if (k == at.slot) continue;
          HalfRef h = sw.slots[k];
          bool h_large = k == sw.large_slot;
          // Same inward state iff both large-or-both-small is false:
          // large and small halves at one switch have opposite inward flags,
          // two smalls share theirs.
          bool want_inward = (b_large == h_large) ? b_inward : !b_inward;
          int want_dir = (want_inward != (h.end == 0)) ? 1 : -1;
          if (dir[h.branch] == 0) {
            dir[h.branch] = want_dir;
            q.push(h.branch);
          } else if (dir[h.branch] != want_dir) {
            return std::nullopt;
          }
        }
      }
    }
  }
  return dir;
}

bool is_orientable(const TrainTrack& t) { return orientation(t).has_value(); }

std::vector<int> large_branches(const TrainTrack& t) {
  require_valid(t);
  std::vector<int> out;
  for (const auto& br : t.branches) {
    bool large = true;
    for (int end = 0; end < 2; ++end) {
      const SlotRef& r = br.ends[end];
      if (t.switches[r.sw].large_slot != r.slot) large = false;
    }
    if (large) out.push_back(br.number);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

int branch_id_by_number(const TrainTrack& t, int number) {
  for (std::size_t i = 0; i < t.branches.size(); ++i) {
    if (t.branches[i].number == number) return static_cast<int>(i);
  }
  return -1;
}

// Re-express puncture marks as the smallest corner of their face.
void normalize_marks(TrainTrack* t) {
  if (t->punctured_faces.empty()) return;
  std::vector<Face> faces = trace_faces(*t);
  std::vector<Corner> marks;
  for (const auto& mark : t->punctured_faces) {
    int f = find_face(faces, mark);
    if (f < 0) fail(Err::MalformedTrack, "puncture mark lost during transport");
    marks.push_back(*std::min_element(faces[f].corners.begin(), faces[f].corners.end()));
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  t->punctured_faces = std::move(marks);
}

}  // namespace

SplitResult split(const TrainTrack& t, const SplitMove& move) {
  require_valid(t);
  const int p = static_cast<int>(t.branches.size());
  int e_id = branch_id_by_number(t, move.branch_number);
  if (e_id < 0) fail(Err::NotLargeBranch, "no branch numbered " + std::to_string(move.branch_number));
  const Branch& eb = t.branches[e_id];
  const int u = eb.ends[0].sw;
  const int v = eb.ends[1].sw;
  if (t.switches[u].large_slot != eb.ends[0].slot || t.switches[v].large_slot != eb.ends[1].slot) {
    fail(Err::NotLargeBranch, "branch " + std::to_string(move.branch_number) + " is not large");
  }

  // The collapsed square at e: at each endpoint the two small half-branches
  // in counterclockwise order after the large slot.
  const int ku = t.switches[u].large_slot;
  const int kv = t.switches[v].large_slot;
  HalfRef a = t.switches[u].slots[(ku + 1) % 3];
  HalfRef b = t.switches[u].slots[(ku + 2) % 3];
  HalfRef d = t.switches[v].slots[(kv + 1) % 3];
  HalfRef c = t.switches[v].slots[(kv + 2) % 3];

  TrainTrack out = t;
  for (auto& br : out.branches) br.orient = 0;

  auto attach = [&out](HalfRef h, int sw, int slot) {
    out.switches[sw].slots[slot] = h;
    out.branches[h.branch].ends[h.end] = SlotRef{sw, slot};
  };

  lin::IMat mat = lin::IMat::identity(p);
  const int row = eb.number - 1;

  // Corner transport for puncture marks on the two dissolved switches.
  std::map<Corner, Corner> corner_map;
  Corner north_u = make_corner(u, ku, (ku + 1) % 3);
  Corner west_u = make_corner(u, (ku + 1) % 3, (ku + 2) % 3);
  Corner south_u = make_corner(u, (ku + 2) % 3, ku);
  Corner south_v = make_corner(v, kv, (kv + 1) % 3);
  Corner east_v = make_corner(v, (kv + 1) % 3, (kv + 2) % 3);
  Corner north_v = make_corner(v, (kv + 2) % 3, kv);

  if (move.dir == SplitDir::Right) {
    // New switch at u: (a | e', c), large a. New switch at v: (d | e', b).
    attach(a, u, 0);
    attach(HalfRef{e_id, 0}, u, 1);
    attach(c, u, 2);
    out.switches[u].large_slot = 0;
    attach(d, v, 0);
    attach(HalfRef{e_id, 1}, v, 1);
    attach(b, v, 2);
    out.switches[v].large_slot = 0;
    mat.at(row, out.branches[b.branch].number - 1) += 1;
    mat.at(row, out.branches[c.branch].number - 1) += 1;
    corner_map[north_u] = make_corner(u, 0, 2);
    corner_map[west_u] = make_corner(v, 1, 2);
    corner_map[south_u] = make_corner(v, 0, 2);
    corner_map[south_v] = make_corner(v, 0, 2);
    corner_map[east_v] = make_corner(u, 1, 2);
    corner_map[north_v] = make_corner(u, 0, 2);
  } else {
    // New switch at u: (b | d, e'), large b. New switch at v: (c | a, e').
    attach(b, u, 0);
    attach(d, u, 1);
    attach(HalfRef{e_id, 0}, u, 2);
    out.switches[u].large_slot = 0;
    attach(c, v, 0);
    attach(a, v, 1);
    attach(HalfRef{e_id, 1}, v, 2);
    out.switches[v].large_slot = 0;
    mat.at(row, out.branches[a.branch].number - 1) += 1;
    mat.at(row, out.branches[d.branch].number - 1) += 1;
    corner_map[north_u] = make_corner(v, 0, 1);
    corner_map[west_u] = make_corner(v, 1, 2);
    corner_map[south_u] = make_corner(u, 0, 1);
    corner_map[south_v] = make_corner(u, 0, 1);
    corner_map[east_v] = make_corner(u, 1, 2);
    corner_map[north_v] = make_corner(v, 0, 1);
  }

  for (auto& mark : out.punctured_faces) {
    auto it = corner_map.find(mark);
    if (it != corner_map.end()) mark = it->second;
  }
  normalize_marks(&out);
  return SplitResult{std::move(out), std::move(mat)};
}

SplitResult full_numbered_split(const TrainTrack& t,
                                const std::vector<std::pair<int, SplitDir>>& choices) {
  require_valid(t);
  std::vector<int> large = large_branches(t);
  if (large.empty()) fail(Err::NoLargeBranches, "track has no large branch");
  std::vector<std::pair<int, SplitDir>> sorted = choices;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<int> keys;
  for (const auto& ch : sorted) keys.push_back(ch.first);
  if (keys != large) {
    fail(Err::IncompleteChoices, "choices must cover exactly the large branches");
  }
  TrainTrack cur = t;
  lin::IMat m = lin::IMat::identity(static_cast<int>(t.branches.size()));
  for (const auto& [number, dir] : sorted) {
    SplitResult step = split(cur, SplitMove{number, dir});
    cur = std::move(step.track);
    m = m * step.matrix;
  }
  return SplitResult{std::move(cur), std::move(m)};
}

namespace {

struct CanonicalLabels {
  std::vector<int> sw_new;        // old switch id -> new id
  std::vector<int> sw_order;      // new id -> old id
  std::vector<int> end_flip;      // branch id -> 1 if ends swapped
};

CanonicalLabels bfs_labels(const TrainTrack& t, int root_branch, int root_end) {
  const int v = static_cast<int>(t.switches.size());
  const int e = static_cast<int>(t.branches.size());
  CanonicalLabels lab;
  lab.sw_new.assign(v, -1);
  lab.end_flip.assign(e, -1);
  std::queue<int> q;
  int root_sw = t.branches[root_branch].ends[root_end].sw;
  lab.sw_new[root_sw] = 0;
  lab.sw_order.push_back(root_sw);
  q.push(root_sw);
  while (!q.empty()) {
    int s = q.front();
    q.pop();
    int large = t.switches[s].large_slot;
    for (int off = 0; off < 3; ++off) {
      HalfRef h = t.switches[s].slots[(large + off) % 3];
      if (lab.end_flip[h.branch] < 0) {
        // First sighting fixes the canonical end order: sighted end becomes 0.
        lab.end_flip[h.branch] = h.end == 0 ? 0 : 1;
      }
      int far = t.branches[h.branch].ends[1 - h.end].sw;
      if (lab.sw_new[far] < 0) {
        lab.sw_new[far] = static_cast<int>(lab.sw_order.size());
        lab.sw_order.push_back(far);
        q.push(far);
      }
    }
  }
  return lab;
}

TrainTrack relabel(const TrainTrack& t, const CanonicalLabels& lab) {
  const int v = static_cast<int>(t.switches.size());
  const int e = static_cast<int>(t.branches.size());
  TrainTrack out;
  out.genus = t.genus;
  out.punctures = t.punctures;
  out.switches.resize(v);
  out.branches.resize(e);

  std::vector<int> branch_new(e);  // old branch id -> new id (= number - 1)
  for (int b = 0; b < e; ++b) branch_new[b] = t.branches[b].number - 1;

  for (int ns = 0; ns < v; ++ns) {
    int os = lab.sw_order[ns];
    int large = t.switches[os].large_slot;
    Switch sw;
    sw.large_slot = 0;
    for (int off = 0; off < 3; ++off) {
      HalfRef h = t.switches[os].slots[(large + off) % 3];
      int ne = lab.end_flip[h.branch] ? 1 - h.end : h.end;
      sw.slots[off] = HalfRef{branch_new[h.branch], ne};
    }
    out.switches[ns] = sw;
  }
  for (int b = 0; b < e; ++b) {
    const Branch& ob = t.branches[b];
    Branch nb;
    nb.number = ob.number;
    nb.orient = 0;
    for (int end = 0; end < 2; ++end) {
      int oe = lab.end_flip[b] ? 1 - end : end;
      SlotRef r = ob.ends[oe];
      int large = t.switches[r.sw].large_slot;
      nb.ends[end] = SlotRef{lab.sw_new[r.sw], (r.slot - large + 3) % 3};
    }
    out.branches[branch_new[b]] = nb;
  }
  for (const auto& mark : t.punctured_faces) {
    int large = t.switches[mark.sw].large_slot;
    out.punctured_faces.push_back(make_corner(lab.sw_new[mark.sw], (mark.slot_a - large + 3) % 3,
                                              (mark.slot_b - large + 3) % 3));
  }
  normalize_marks(&out);
  return out;
}

std::string serialize(const TrainTrack& t, bool with_orient) {
  nlohmann::ordered_json j;
  j["surface"] = {{"genus", t.genus}, {"punctures", t.punctures}};
  j["switches"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < t.switches.size(); ++s) {
    nlohmann::ordered_json sw;
    sw["id"] = s;
    sw["slots"] = nlohmann::ordered_json::array();
    for (const auto& h : t.switches[s].slots) {
      sw["slots"].push_back({h.branch, h.end});
    }
    sw["large_slot"] = t.switches[s].large_slot;
    j["switches"].push_back(sw);
  }
  j["branches"] = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < t.branches.size(); ++b) {
    nlohmann::ordered_json br;
    br["id"] = b;
    br["number"] = t.branches[b].number;
    br["ends"] = {{t.branches[b].ends[0].sw, t.branches[b].ends[0].slot},
                  {t.branches[b].ends[1].sw, t.branches[b].ends[1].slot}};
    if (with_orient && t.branches[b].orient != 0) {
      br["orient"] = t.branches[b].orient;
    } else {
      br["orient"] = nullptr;
    }
    j["branches"].push_back(br);
  }
  j["punctured_faces"] = nlohmann::ordered_json::array();
  for (const auto& m : t.punctured_faces) {
    j["punctured_faces"].push_back({m.sw, m.slot_a, m.slot_b});
  }
  return j.dump();
}

}  // namespace

TrainTrack canonical_form(const TrainTrack& t) {
  int root = branch_id_by_number(t, 1);
  if (root < 0) fail(Err::MalformedTrack, "no branch numbered 1");
  TrainTrack best;
  std::string best_bytes;
  for (int end = 0; end < 2; ++end) {
    TrainTrack cand = relabel(t, bfs_labels(t, root, end));
    std::string bytes = serialize(cand, false);
    if (best_bytes.empty() || bytes < best_bytes) {
      best_bytes = std::move(bytes);
      best = std::move(cand);
    }
  }
  return best;
}

std::string canonical_bytes(const TrainTrack& t) { return serialize(canonical_form(t), false); }

std::uint64_t canonical_hash(const TrainTrack& t) {
  std::string bytes = canonical_bytes(t);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_tt_string(const TrainTrack& t) { return serialize(t, true); }

TrainTrack from_tt_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& ex) {
    fail(Err::IoError, std::string("track parse error: ") + ex.what());
  }
  try {
    TrainTrack t;
    t.genus = j.at("surface").at("genus").get<int>();
    t.punctures = j.at("surface").at("punctures").get<int>();
    std::map<long long, int> sw_index;
    for (const auto& sw : j.at("switches")) {
      sw_index[sw.at("id").get<long long>()] = static_cast<int>(sw_index.size());
    }
    std::map<long long, int> br_index;
    for (const auto& br : j.at("branches")) {
      br_index[br.at("id").get<long long>()] = static_cast<int>(br_index.size());
    }
    t.switches.resize(sw_index.size());
    t.branches.resize(br_index.size());
    int si = 0;
    for (const auto& sw : j.at("switches")) {
      Switch s;
      if (sw.contains("large_slot") && !sw.at("large_slot").is_null()) {
        s.large_slot = sw.at("large_slot").get<int>();
      } else {
        s.large_slot = -1;
      }
      const auto& slots = sw.at("slots");
      if (slots.size() != 3) fail(Err::MalformedTrack, "switch must have 3 slots");
      for (int k = 0; k < 3; ++k) {
        long long bid = slots[k][0].get<long long>();
        auto it = br_index.find(bid);
        if (it == br_index.end()) fail(Err::MalformedTrack, "slot names unknown branch");
        s.slots[k] = HalfRef{it->second, slots[k][1].get<int>()};
      }
      t.switches[si++] = s;
    }
    int bi = 0;
    for (const auto& br : j.at("branches")) {
      Branch b;
      b.number = br.at("number").get<int>();
      const auto& ends = br.at("ends");
      if (ends.size() != 2) fail(Err::MalformedTrack, "branch must have 2 ends");
      for (int endi = 0; endi < 2; ++endi) {
        long long sid = ends[endi][0].get<long long>();
        auto it = sw_index.find(sid);
        if (it == sw_index.end()) fail(Err::MalformedTrack, "end names unknown switch");
        b.ends[endi] = SlotRef{it->second, ends[endi][1].get<int>()};
      }
      if (br.contains("orient") && !br.at("orient").is_null()) {
        b.orient = br.at("orient").get<int>();
      }
      t.branches[bi++] = b;
    }
    if (j.contains("punctured_faces")) {
      for (const auto& m : j.at("punctured_faces")) {
        long long sid = m[0].get<long long>();
        auto it = sw_index.find(sid);
        if (it == sw_index.end()) fail(Err::MalformedTrack, "puncture mark names unknown switch");
        t.punctured_faces.push_back(make_corner(it->second, m[1].get<int>(), m[2].get<int>()));
      }
    }
    return t;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    fail(Err::IoError, std::string("track schema error: ") + ex.what());
  }
}

TrainTrack load_tt_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_tt_string(ss.str());
}

void save_tt_file(const TrainTrack& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Err::IoError, "cannot write " + path);
  out << to_tt_string(t) << "\n";
}

TrainTrack permute_numbers(const TrainTrack& t, const std::vector<int>& perm) {
  TrainTrack out = t;
  for (auto& br : out.branches) br.number = perm[br.number - 1];
  return out;
}

lin::QMat switch_matrix(const TrainTrack& t) {
  const int p = static_cast<int>(t.branches.size());
  lin::QMat rows;
  for (const auto& sw : t.switches) {
    lin::QVec row(p, Rational(0));
    for (int k = 0; k < 3; ++k) {
      const HalfRef& h = sw.slots[k];
      int col = t.branches[h.branch].number - 1;
      row[col] += Rational(k == sw.large_slot ? 1 : -1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ttlab::track
