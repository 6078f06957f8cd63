#include "mansa/lbf.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace mansa {
namespace {

Cell moved(Cell c, int action) {
  switch (action) {
    case kUp: return {c.x, c.y - 1};
    case kDown: return {c.x, c.y + 1};
    case kLeft: return {c.x - 1, c.y};
    case kRight: return {c.x + 1, c.y};
    default: return c;
  }
}

bool adjacent(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1; }

// Product of the per-digit radices of the state key, or 0 on 64-bit overflow.
std::uint64_t key_space(const LbfConfig& c, int max_food_level) {
  std::uint64_t total = 1;
  auto times = [&total](std::uint64_t r) {
    if (total == 0) return;
    if (r != 0 && total > std::numeric_limits<std::uint64_t>::max() / r) {
      total = 0;
      return;
    }
    total *= r;
  };
  const std::uint64_t cells = static_cast<std::uint64_t>(c.width) * c.height;
  for (int i = 0; i < c.n_players; ++i) {
    times(cells);
    times(c.max_player_level);
  }
  for (int i = 0; i < c.n_foods; ++i) {
    times(cells);
    times(max_food_level);
    times(2);
  }
  return total;
}

}  // namespace

void validate(const LbfConfig& c) {
  if (c.width < 1 || c.height < 1) throw ConfigError("lbf: width and height must be positive");
  if (c.n_players < 2) throw ConfigError("lbf: need at least two players");
  if (c.n_foods < 1) throw ConfigError("lbf: need at least one food");
  if (c.max_player_level < 1) throw ConfigError("lbf: max_player_level must be positive");
  if (c.sight < 0) throw ConfigError("lbf: sight must be non-negative");
  if (c.episode_limit < 1) throw ConfigError("lbf: episode_limit must be positive");
  if (static_cast<long long>(c.n_players) + c.n_foods > static_cast<long long>(c.width) * c.height) {
    throw ConfigError("lbf: more entities than grid cells");
  }
}

LbfEnv::LbfEnv(LbfConfig config) : config_(config) {
  validate(config_);
  std::uint64_t space = key_space(config_, max_food_level());
  if (space == 0) throw ConfigError("lbf: state space does not fit a 64-bit key");
  spec_ = EnvSpec{config_.coop ? "lbf-coop" : "lbf",
                  config_.n_players,
                  std::vector<int>(config_.n_players, kLbfActionCount),
                  space,
                  config_.episode_limit,
                  config_.discount};
  validate(spec_);
}

int LbfEnv::max_food_level() const {
  return config_.coop ? config_.n_players * config_.max_player_level : config_.max_player_level;
}

double LbfEnv::total_food_level() const {
  double total = 0.0;
  for (const auto& f : state_.foods) total += f.level;
  return total;
}

bool LbfEnv::food_at(Cell c) const {
  return std::any_of(state_.foods.begin(), state_.foods.end(),
                     [c](const LbfFood& f) { return !f.collected && f.pos == c; });
}

bool LbfEnv::player_at(Cell c) const {
  return std::any_of(state_.players.begin(), state_.players.end(),
                     [c](const LbfPlayer& p) { return p.pos == c; });
}

ResetResult LbfEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  const int w = config_.width;
  const int h = config_.height;
  auto cell_of = [w](int idx) { return Cell{idx % w, idx / w}; };

  // Food stays off the border whenever the interior has room for it.
  std::vector<int> interior;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) interior.push_back(y * w + x);
  }
  std::vector<int> food_pool = interior;
  if (static_cast<int>(food_pool.size()) < config_.n_foods) {
    food_pool.resize(w * h);
    std::iota(food_pool.begin(), food_pool.end(), 0);
  }
  std::vector<int> food_cells;
  for (int k = 0; k < config_.n_foods; ++k) {
    int j = k + uniform_index(rng, static_cast<int>(food_pool.size()) - k);
    std::swap(food_pool[k], food_pool[j]);
    food_cells.push_back(food_pool[k]);
  }
  std::vector<int> free_cells;
  for (int idx = 0; idx < w * h; ++idx) {
    if (std::find(food_cells.begin(), food_cells.end(), idx) == food_cells.end()) free_cells.push_back(idx);
  }
  for (int i = 0; i < config_.n_players; ++i) {
    int j = i + uniform_index(rng, static_cast<int>(free_cells.size()) - i);
    std::swap(free_cells[i], free_cells[j]);
  }

  LbfState s;
  int level_sum = 0;
  for (int i = 0; i < config_.n_players; ++i) {
    int level = 1 + uniform_index(rng, config_.max_player_level);
    level_sum += level;
    s.players.push_back({cell_of(free_cells[i]), level, true});
  }
  for (int k = 0; k < config_.n_foods; ++k) {
    // Coop foods need every player's level combined, hence at least two loaders.
    int level = config_.coop ? level_sum : 1 + uniform_index(rng, config_.max_player_level);
    s.foods.push_back({cell_of(food_cells[k]), level, false});
  }
  state_ = std::move(s);
  started_ = true;
  return {state_key(), observations()};
}

void LbfEnv::set_state(LbfState state) {
  if (static_cast<int>(state.players.size()) != config_.n_players ||
      static_cast<int>(state.foods.size()) != config_.n_foods) {
    throw ConfigError("lbf: state has wrong entity counts");
  }
  std::vector<Cell> occupied;
  for (const auto& p : state.players) {
    if (!in_grid(p.pos)) throw ConfigError("lbf: player off grid");
    if (p.level < 1 || p.level > config_.max_player_level) throw ConfigError("lbf: bad player level");
    occupied.push_back(p.pos);
  }
  for (const auto& f : state.foods) {
    if (!in_grid(f.pos)) throw ConfigError("lbf: food off grid");
    if (f.level < 1 || f.level > max_food_level()) throw ConfigError("lbf: bad food level");
    if (!f.collected) occupied.push_back(f.pos);
  }
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    for (std::size_t j = i + 1; j < occupied.size(); ++j) {
      if (occupied[i] == occupied[j]) throw ConfigError("lbf: two entities share a cell");
    }
  }
  state_ = std::move(state);
  started_ = true;
}

bool LbfEnv::terminal() const {
  if (!started_) return true;
  if (state_.step_count >= config_.episode_limit) return true;
  return std::all_of(state_.foods.begin(), state_.foods.end(),
                     [](const LbfFood& f) { return f.collected; });
}

StepOutcome LbfEnv::step(const JointAction& joint_action) {
  check_joint_action(joint_action);
  const int n = config_.n_players;

  std::vector<Cell> target(n);
  for (int i = 0; i < n; ++i) {
    Cell from = state_.players[i].pos;
    Cell to = moved(from, joint_action[i]);
    bool valid = !(to == from) && in_grid(to) && !food_at(to) && !player_at(to);
    target[i] = valid ? to : from;
  }
  // Movers that contend for one cell all stay put.
  std::vector<Cell> resolved = target;
  for (int i = 0; i < n; ++i) {
    if (target[i] == state_.players[i].pos) continue;
    for (int j = 0; j < n; ++j) {
      if (j != i && target[j] == target[i]) {
        resolved[i] = state_.players[i].pos;
        break;
      }
    }
  }
  for (int i = 0; i < n; ++i) state_.players[i].pos = resolved[i];

  double collected_level = 0.0;
  const double total = total_food_level();
  std::vector<char> collect(state_.foods.size(), 0);
  for (std::size_t k = 0; k < state_.foods.size(); ++k) {
    const LbfFood& f = state_.foods[k];
    if (f.collected) continue;
    int loading = 0;
    for (int i = 0; i < n; ++i) {
      if (joint_action[i] == kLoad && adjacent(state_.players[i].pos, f.pos)) {
        loading += state_.players[i].level;
      }
    }
    if (loading > 0 && loading >= f.level) collect[k] = 1;
  }
  for (std::size_t k = 0; k < state_.foods.size(); ++k) {
    if (collect[k]) {
      state_.foods[k].collected = true;
      collected_level += state_.foods[k].level;
    }
  }
  ++state_.step_count;
  const bool all_collected = std::all_of(state_.foods.begin(), state_.foods.end(),
                                         [](const LbfFood& f) { return f.collected; });
  const bool done = terminal();
  return {collected_level / total, state_key(), observations(), done, done && !all_collected};
}

Observation LbfEnv::observe(int agent) const {
  if (agent < 0 || agent >= config_.n_players) throw ContractViolation("lbf: bad agent index");
  const int s = config_.sight;
  const Cell centre = state_.players[agent].pos;
  Observation obs;
  obs.reserve(2 * (2 * s + 1) * (2 * s + 1) + 1);
  for (int dy = -s; dy <= s; ++dy) {
    for (int dx = -s; dx <= s; ++dx) {
      Cell c{centre.x + dx, centre.y + dy};
      int cls = kEmpty;
      int level = 0;
      if (!in_grid(c)) {
        cls = kWall;
      } else {
        for (const auto& p : state_.players) {
          if (p.pos == c) {
            cls = kPlayer;
            level = p.level;
          }
        }
        for (const auto& f : state_.foods) {
          if (!f.collected && f.pos == c) {
            cls = kFood;
            level = f.level;
          }
        }
      }
      obs.push_back(cls);
      obs.push_back(level);
    }
  }
  obs.push_back(state_.players[agent].level);
  return obs;
}

std::vector<Observation> LbfEnv::observations() const {
  std::vector<Observation> out;
  out.reserve(config_.n_players);
  for (int i = 0; i < config_.n_players; ++i) out.push_back(observe(i));
  return out;
}

StateKey LbfEnv::encode(const LbfState& s) const {
  const std::uint64_t cells = static_cast<std::uint64_t>(config_.width) * config_.height;
  StateKey key = 0;
  std::uint64_t scale = 1;
  auto put = [&](std::uint64_t digit, std::uint64_t radix) {
    key += digit * scale;
    scale *= radix;
  };
  for (const auto& p : s.players) {
    put(static_cast<std::uint64_t>(p.pos.y) * config_.width + p.pos.x, cells);
    put(p.level - 1, config_.max_player_level);
  }
  const int food_levels = max_food_level();
  for (const auto& f : s.foods) {
    put(static_cast<std::uint64_t>(f.pos.y) * config_.width + f.pos.x, cells);
    put(f.level - 1, food_levels);
    put(f.collected ? 1 : 0, 2);
  }
  return key;
}

FocalCell LbfEnv::focal_cell(StateKey key) const {
  const std::uint64_t cells = static_cast<std::uint64_t>(config_.width) * config_.height;
  const auto idx = static_cast<int>(key % cells);
  return {idx % config_.width, idx / config_.width};
}

}  // namespace mansa
