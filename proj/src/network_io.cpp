#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gtnn/network.hpp"

namespace gtnn {

namespace {

std::string widths_string(const std::vector<int>& widths) {
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(widths[i]);
  }
  return s;
}

std::vector<int> parse_widths(const std::string& s) {
  std::vector<int> widths;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) widths.push_back(std::stoi(item));
  return widths;
}

}  // namespace

void save_checkpoint(const std::string& path, const Network& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  const NetworkSpec& s = net.spec;
  out << "gtnn v1 family=" << family_name(s.family) << " L=" << s.depth
      << " widths=" << widths_string(s.widths) << " d=" << s.input_dim
      << " act=" << activation_name(s.activation) << " bias=" << (s.output_bias ? 1 : 0)
      << " composed=" << (s.composed ? 1 : 0) << " n=" << net.params.size() << "\n";
  const auto data = net.params.all();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Network load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("load_checkpoint: empty file");
  std::stringstream ss(header);
  std::string magic, version;
  ss >> magic >> version;
  if (magic != "gtnn" || version != "v1")
    throw std::runtime_error("load_checkpoint: bad header in " + path);

  NetworkSpec spec;
  std::size_t count = 0;
  std::string field;
  while (ss >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("load_checkpoint: malformed header field: " + field);
    const std::string key = field.substr(0, eq);
    const std::string val = field.substr(eq + 1);
    if (key == "family") spec.family = family_from_name(val);
    else if (key == "L") spec.depth = std::stoi(val);
    else if (key == "widths") spec.widths = parse_widths(val);
    else if (key == "d") spec.input_dim = std::stoi(val);
    else if (key == "act") spec.activation = activation_from_name(val);
    else if (key == "bias") spec.output_bias = val == "1";
    else if (key == "composed") spec.composed = val == "1";
    else if (key == "n") count = static_cast<std::size_t>(std::stoull(val));
    else throw std::runtime_error("load_checkpoint: unknown header field: " + key);
  }
  spec.validate();

  Network net{spec, ParamVector(spec)};
  if (net.params.size() != count)
    throw std::runtime_error("load_checkpoint: parameter count mismatch");
  auto data = net.params.all();
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(data.size() * sizeof(double)))
    throw std::runtime_error("load_checkpoint: truncated parameter block");
  return net;
}

}  // namespace gtnn
