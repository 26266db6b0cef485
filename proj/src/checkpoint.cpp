#include "sgrbm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "sgrbm/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace sgrbm {

namespace {

constexpr char kRbmMagic[6] = {'S', 'G', 'R', 'B', 'M', '1'};
constexpr char kDbmMagic[6] = {'S', 'G', 'D', 'B', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

void write_u8(std::ofstream& out, std::uint8_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

void write_f64_block(std::ofstream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

void write_matrix(std::ofstream& out, const Matrix& m) {
  write_f64_block(out, m.data(), static_cast<std::size_t>(m.size()));
}

void write_vector(std::ofstream& out, const Vector& v) {
  write_f64_block(out, v.data(), static_cast<std::size_t>(v.size()));
}

void write_grouping(std::ofstream& out, const Grouping& g) {
  write_u32(out, static_cast<std::uint32_t>(g.group_of.size()));
  for (int id : g.group_of) write_u32(out, static_cast<std::uint32_t>(id));
}

void write_string(std::ofstream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

struct Reader {
  std::ifstream in;
  std::string path;

  void read_raw(void* dest, std::size_t count, const char* what) {
    in.read(static_cast<char*>(dest), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
      throw ParseError(path + ": truncated checkpoint while reading " + std::string(what));
    }
  }
  std::uint32_t u32(const char* what) {
    std::uint32_t v;
    read_raw(&v, sizeof v, what);
    return v;
  }
  std::uint8_t u8(const char* what) {
    std::uint8_t v;
    read_raw(&v, sizeof v, what);
    return v;
  }
  Matrix matrix(Eigen::Index rows, Eigen::Index cols, const char* what) {
    Matrix m(rows, cols);
    read_raw(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double), what);
    return m;
  }
  Vector vector(Eigen::Index size, const char* what) {
    Vector v(size);
    read_raw(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double), what);
    return v;
  }
  Grouping grouping(Eigen::Index expected_units, const char* what) {
    const std::uint32_t units = u32(what);
    if (static_cast<Eigen::Index>(units) != expected_units) {
      throw ParseError(path + ": grouping size mismatch in " + std::string(what));
    }
    Grouping g;
    g.group_of.resize(units);
    int max_id = -1;
    for (std::uint32_t j = 0; j < units; ++j) {
      const auto id = static_cast<int>(u32(what));
      g.group_of[j] = id;
      max_id = std::max(max_id, id);
    }
    g.groups.assign(static_cast<std::size_t>(max_id) + 1, {});
    for (std::uint32_t j = 0; j < units; ++j) {
      g.groups[static_cast<std::size_t>(g.group_of[j])].push_back(static_cast<int>(j));
    }
    if (!g.is_partition()) throw ParseError(path + ": stored grouping is not a partition");
    return g;
  }
  std::string string(const char* what) {
    const std::uint32_t len = u32(what);
    std::string s(len, '\0');
    read_raw(s.data(), len, what);
    return s;
  }
};

Reader open_reader(const std::string& path, const char (&magic)[6], const char* kind) {
  Reader r{std::ifstream(path, std::ios::binary), path};
  if (!r.in) throw ParseError(path + ": cannot open file");
  char found[6];
  r.read_raw(found, sizeof found, "magic");
  if (std::memcmp(found, magic, sizeof found) != 0) {
    throw ParseError(path + ": not a " + std::string(kind) + " checkpoint");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kVersion) {
    throw ParseError(path + ": unsupported checkpoint version " + std::to_string(version));
  }
  return r;
}

std::ofstream open_writer(const std::string& path, const char (&magic)[6]) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out.write(magic, sizeof magic);
  write_u32(out, kVersion);
  return out;
}

}  // namespace

void save_checkpoint(const std::string& path, const RbmCheckpoint& checkpoint) {
  const RbmParams& p = checkpoint.params;
  if (!p.shape_consistent()) throw DimensionError("save_checkpoint: inconsistent rbm shapes");

  std::ofstream out = open_writer(path, kRbmMagic);
  write_u8(out, p.visible_type == VisibleType::binary ? 0 : 1);
  write_u32(out, static_cast<std::uint32_t>(p.num_visible()));
  write_u32(out, static_cast<std::uint32_t>(p.num_hidden()));
  write_u32(out, checkpoint.epoch);
  write_u8(out, checkpoint.has_opt ? 1 : 0);
  write_u8(out, checkpoint.has_grouping ? 1 : 0);
  write_u8(out, checkpoint.has_rng ? 1 : 0);
  write_matrix(out, p.weights);
  write_vector(out, p.visible_bias);
  write_vector(out, p.hidden_bias);
  if (checkpoint.has_opt) {
    write_matrix(out, checkpoint.opt.vel_weights);
    write_vector(out, checkpoint.opt.vel_visible_bias);
    write_vector(out, checkpoint.opt.vel_hidden_bias);
  }
  if (checkpoint.has_grouping) write_grouping(out, checkpoint.grouping);
  if (checkpoint.has_rng) write_string(out, checkpoint.rng_state);
  if (!out) throw ParseError(path + ": write failed");
}

void save_checkpoint(const std::string& path, const DbmCheckpoint& checkpoint) {
  const DbmParams& p = checkpoint.params;
  if (!p.shape_consistent()) throw DimensionError("save_checkpoint: inconsistent dbm shapes");

  std::ofstream out = open_writer(path, kDbmMagic);
  write_u8(out, 2);  // layer count
  write_u8(out, 0);  // binary visibles
  write_u32(out, static_cast<std::uint32_t>(p.num_visible()));
  write_u32(out, static_cast<std::uint32_t>(p.num_hidden1()));
  write_u32(out, static_cast<std::uint32_t>(p.num_hidden2()));
  write_u32(out, checkpoint.epoch);
  write_u8(out, checkpoint.has_opt ? 1 : 0);
  write_u8(out, checkpoint.has_groupings ? 1 : 0);
  write_u8(out, checkpoint.has_particles ? 1 : 0);
  write_u8(out, checkpoint.has_rng ? 1 : 0);
  write_matrix(out, p.w1);
  write_matrix(out, p.w2);
  write_vector(out, p.visible_bias);
  write_vector(out, p.hidden1_bias);
  write_vector(out, p.hidden2_bias);
  if (checkpoint.has_opt) {
    write_matrix(out, checkpoint.opt.vel_w1);
    write_matrix(out, checkpoint.opt.vel_w2);
    write_vector(out, checkpoint.opt.vel_visible_bias);
    write_vector(out, checkpoint.opt.vel_hidden1_bias);
    write_vector(out, checkpoint.opt.vel_hidden2_bias);
  }
  if (checkpoint.has_groupings) {
    write_grouping(out, checkpoint.grouping1);
    write_grouping(out, checkpoint.grouping2);
  }
  if (checkpoint.has_particles) {
    write_u32(out, static_cast<std::uint32_t>(checkpoint.particles.count()));
    write_matrix(out, checkpoint.particles.visible);
    write_matrix(out, checkpoint.particles.hidden1);
    write_matrix(out, checkpoint.particles.hidden2);
  }
  if (checkpoint.has_rng) write_string(out, checkpoint.rng_state);
  if (!out) throw ParseError(path + ": write failed");
}

CheckpointKind peek_checkpoint_kind(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  char magic[6];
  in.read(magic, sizeof magic);
  if (in.gcount() != sizeof magic) throw ParseError(path + ": truncated checkpoint header");
  if (std::memcmp(magic, kRbmMagic, sizeof magic) == 0) return CheckpointKind::rbm;
  if (std::memcmp(magic, kDbmMagic, sizeof magic) == 0) return CheckpointKind::dbm;
  throw ParseError(path + ": unrecognized checkpoint magic");
}

RbmCheckpoint load_rbm_checkpoint(const std::string& path) {
  Reader r = open_reader(path, kRbmMagic, "SGRBM1");
  RbmCheckpoint ckpt;
  const std::uint8_t type = r.u8("visible type");
  if (type > 1) throw ParseError(path + ": unknown visible type tag");
  ckpt.params.visible_type = type == 0 ? VisibleType::binary : VisibleType::gaussian;
  const auto v = static_cast<Eigen::Index>(r.u32("V"));
  const auto h = static_cast<Eigen::Index>(r.u32("H"));
  ckpt.epoch = r.u32("epoch");
  ckpt.has_opt = r.u8("opt flag") != 0;
  ckpt.has_grouping = r.u8("grouping flag") != 0;
  ckpt.has_rng = r.u8("rng flag") != 0;
  ckpt.params.weights = r.matrix(v, h, "weights");
  ckpt.params.visible_bias = r.vector(v, "visible bias");
  ckpt.params.hidden_bias = r.vector(h, "hidden bias");
  if (ckpt.has_opt) {
    ckpt.opt.vel_weights = r.matrix(v, h, "weight velocity");
    ckpt.opt.vel_visible_bias = r.vector(v, "visible bias velocity");
    ckpt.opt.vel_hidden_bias = r.vector(h, "hidden bias velocity");
  }
  if (ckpt.has_grouping) ckpt.grouping = r.grouping(h, "grouping");
  if (ckpt.has_rng) ckpt.rng_state = r.string("rng state");
  return ckpt;
}

DbmCheckpoint load_dbm_checkpoint(const std::string& path) {
  Reader r = open_reader(path, kDbmMagic, "SGDBM1");
  DbmCheckpoint ckpt;
  const std::uint8_t layers = r.u8("layer count");
  if (layers != 2) throw ParseError(path + ": unsupported layer count");
  const std::uint8_t type = r.u8("visible type");
  if (type != 0) throw ParseError(path + ": dbm checkpoints are binary only");
  const auto v = static_cast<Eigen::Index>(r.u32("V"));
  const auto h1 = static_cast<Eigen::Index>(r.u32("H1"));
  const auto h2 = static_cast<Eigen::Index>(r.u32("H2"));
  ckpt.epoch = r.u32("epoch");
  ckpt.has_opt = r.u8("opt flag") != 0;
  ckpt.has_groupings = r.u8("groupings flag") != 0;
  ckpt.has_particles = r.u8("particles flag") != 0;
  ckpt.has_rng = r.u8("rng flag") != 0;
  ckpt.params.w1 = r.matrix(v, h1, "w1");
  ckpt.params.w2 = r.matrix(h1, h2, "w2");
  ckpt.params.visible_bias = r.vector(v, "visible bias");
  ckpt.params.hidden1_bias = r.vector(h1, "hidden1 bias");
  ckpt.params.hidden2_bias = r.vector(h2, "hidden2 bias");
  if (ckpt.has_opt) {
    ckpt.opt.vel_w1 = r.matrix(v, h1, "w1 velocity");
    ckpt.opt.vel_w2 = r.matrix(h1, h2, "w2 velocity");
    ckpt.opt.vel_visible_bias = r.vector(v, "visible bias velocity");
    ckpt.opt.vel_hidden1_bias = r.vector(h1, "hidden1 bias velocity");
    ckpt.opt.vel_hidden2_bias = r.vector(h2, "hidden2 bias velocity");
  }
  if (ckpt.has_groupings) {
    ckpt.grouping1 = r.grouping(h1, "grouping1");
    ckpt.grouping2 = r.grouping(h2, "grouping2");
  }
  if (ckpt.has_particles) {
    const auto m = static_cast<Eigen::Index>(r.u32("particle count"));
    ckpt.particles.visible = r.matrix(m, v, "particle visibles");
    ckpt.particles.hidden1 = r.matrix(m, h1, "particle hidden1");
    ckpt.particles.hidden2 = r.matrix(m, h2, "particle hidden2");
  }
  if (ckpt.has_rng) ckpt.rng_state = r.string("rng state");
  return ckpt;
}

}  // namespace sgrbm
