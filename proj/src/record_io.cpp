#include "sigmax/record_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sigmax {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingOutput("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a(ss.str());
}

std::uint64_t params_hash(const SystemParams& p) {
  const double fields[] = {p.omega_c, p.omega_q,  p.chi,       p.kappa,     p.Omega_R, p.epsilon_sb,
                           p.omega_sb, p.omega_qp, p.Delta_c,  p.Delta_q,   p.epsilon_r,
                           p.Delta_r, p.alpha_anh, p.T1,        p.T2R,       p.p_e_thermal};
  std::uint64_t h = fnv1a(std::string_view(reinterpret_cast<const char*>(fields), sizeof(fields)));
  const char flag = p.frame_matched ? 1 : 0;
  return fnv1a(std::string_view(&flag, 1), h);
}

void write_record_csv(const std::string& path, const IQRecord& record,
                      const std::vector<int>& hidden) {
  if (!hidden.empty() && hidden.size() != record.samples.size()) {
    throw InvalidParams("write_record_csv: hidden sequence length mismatch");
  }
  std::ofstream out(path);
  if (!out) throw MissingOutput("cannot write " + path);
  out << "# t_m_us=" << std::setprecision(17) << units::to_us(record.t_m) << " seed=" << record.seed
      << " params_hash=" << record.params_hash << "\n";
  out << "t_us,I,Q,hidden_state\n";
  for (std::size_t k = 0; k < record.samples.size(); ++k) {
    out << units::to_us(k * record.t_m) << ',' << record.samples[k].real() << ','
        << record.samples[k].imag() << ',' << (hidden.empty() ? -1 : hidden[k]) << '\n';
  }
}

LoadedRecord read_record_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingOutput("cannot read " + path);
  LoadedRecord out;
  std::string line;
  bool any_hidden = false;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string token;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
        if (key == "t_m_us") out.record.t_m = units::us(std::stod(value));
        else if (key == "seed") out.record.seed = std::stoull(value);
        else if (key == "params_hash") out.record.params_hash = std::stoull(value);
      }
      continue;
    }
    if (line.rfind("t_us", 0) == 0) continue;
    std::istringstream row(line);
    std::string cell[4];
    for (auto& c : cell) std::getline(row, c, ',');
    try {
      times.push_back(std::stod(cell[0]));
      out.record.samples.emplace_back(std::stod(cell[1]), std::stod(cell[2]));
      const int h = cell[3].empty() ? -1 : std::stoi(cell[3]);
      out.hidden.push_back(h);
      any_hidden = any_hidden || h >= 0;
    } catch (const std::exception&) {
      throw SchemaError("read_record_csv: malformed row '" + line + "'");
    }
  }
  if (out.record.t_m == 0 && times.size() > 1) out.record.t_m = units::us(times[1] - times[0]);
  if (!any_hidden) out.hidden.clear();
  return out;
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary records assume little endian");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw SchemaError("read_record_binary: truncated file");
  return v;
}

constexpr char kMagic[9] = "SGXIQ001";

}  // namespace

void write_record_binary(const std::string& path, const IQRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingOutput("cannot write " + path);
  out.write(kMagic, 8);
  put<std::uint64_t>(out, record.params_hash);
  put<std::uint64_t>(out, record.seed);
  put<double>(out, record.t_m);
  put<std::uint64_t>(out, record.samples.size());
  for (const cplx& s : record.samples) {
    put<double>(out, s.real());
    put<double>(out, s.imag());
  }
}

IQRecord read_record_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingOutput("cannot read " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw SchemaError("read_record_binary: bad magic");
  IQRecord r;
  r.params_hash = get<std::uint64_t>(in);
  r.seed = get<std::uint64_t>(in);
  r.t_m = get<double>(in);
  const auto n = get<std::uint64_t>(in);
  r.samples.resize(n);
  for (auto& s : r.samples) {
    const double i = get<double>(in);
    const double q = get<double>(in);
    s = {i, q};
  }
  return r;
}

}  // namespace sigmax
