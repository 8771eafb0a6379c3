#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sizegs/error.hpp"
#include "sizegs/model.hpp"

namespace sizegs {

namespace detail {

enum class PlyType : std::uint8_t { f32, f64 };

struct PlyProperty {
  std::string name;
  PlyType type;
  std::size_t offset;  // byte offset within one vertex record
};

inline std::size_t ply_type_size(PlyType t) { return t == PlyType::f32 ? 4 : 8; }

inline PlyType ply_type_from_name(const std::string& s, std::size_t lineno) {
  if (s == "float" || s == "float32") return PlyType::f32;
  if (s == "double" || s == "float64") return PlyType::f64;
  fail(ErrorKind::malformed_input,
       "ply header line " + std::to_string(lineno) + ": unsupported property type '" + s +
           "' (scalar float/double only)");
}

inline double read_scalar(const unsigned char* p, PlyType t) {
  if (t == PlyType::f32) {
    float v;
    std::memcpy(&v, p, 4);
    return static_cast<double>(v);
  }
  double v;
  std::memcpy(&v, p, 8);
  return v;
}

}  // namespace detail

inline std::vector<ChannelSchema> load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open schema descriptor " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_schema_text(ss.str());
}

inline void save_schema(const std::vector<ChannelSchema>& schema,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io_error, "cannot write schema descriptor " + path.string());
  out << schema_to_text(schema);
  if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
}

// Reads a binary little-endian PLY with a single vertex element. Positions
// come from properties x/y/z; each schema group of width w maps to property
// "name" (w == 1) or "name_0".."name_{w-1}". A property named "importance"
// loads the optional per-point score. Unreferenced properties are skipped.
inline GaussianModel load_model(const std::filesystem::path& path,
                                const std::vector<ChannelSchema>& schema) {
  validate_schema(schema);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());

  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line))
      fail(ErrorKind::malformed_input, path.string() + ": truncated ply header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno;
    return line;
  };

  if (!std::getline(in, line) || (line != "ply" && line != "ply\r"))
    fail(ErrorKind::malformed_input, path.string() + ": missing 'ply' magic on line 1");
  lineno = 1;

  std::size_t vertex_count = 0;
  bool in_vertex_element = false;
  bool format_seen = false;
  std::vector<detail::PlyProperty> props;
  std::size_t stride = 0;

  for (;;) {
    next_line();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok.empty() || tok == "comment" || tok == "obj_info") continue;
    if (tok == "format") {
      std::string fmt, ver;
      ls >> fmt >> ver;
      if (fmt != "binary_little_endian")
        fail(ErrorKind::malformed_input,
             path.string() + " line " + std::to_string(lineno) +
                 ": format must be binary_little_endian, got '" + fmt + "'");
      format_seen = true;
    } else if (tok == "element") {
      std::string name;
      std::size_t count = 0;
      if (!(ls >> name >> count))
        fail(ErrorKind::malformed_input,
             path.string() + " line " + std::to_string(lineno) + ": bad element line");
      if (name != "vertex")
        fail(ErrorKind::malformed_input,
             path.string() + " line " + std::to_string(lineno) + ": unsupported element '" +
                 name + "'");
      vertex_count = count;
      in_vertex_element = true;
    } else if (tok == "property") {
      if (!in_vertex_element)
        fail(ErrorKind::malformed_input,
             path.string() + " line " + std::to_string(lineno) +
                 ": property outside vertex element");
      std::string type, name;
      if (!(ls >> type >> name))
        fail(ErrorKind::malformed_input,
             path.string() + " line " + std::to_string(lineno) + ": bad property line");
      const auto t = detail::ply_type_from_name(type, lineno);
      props.push_back({name, t, stride});
      stride += detail::ply_type_size(t);
    } else if (tok == "end_header") {
      break;
    } else {
      fail(ErrorKind::malformed_input, path.string() + " line " + std::to_string(lineno) +
                                           ": unexpected token '" + tok + "'");
    }
  }
  if (!format_seen)
    fail(ErrorKind::malformed_input, path.string() + ": header lacks a format line");
  if (vertex_count == 0)
    fail(ErrorKind::malformed_input, path.string() + ": vertex element is empty or missing");

  std::map<std::string, const detail::PlyProperty*> by_name;
  for (const auto& p : props) by_name[p.name] = &p;
  auto require = [&](const std::string& name) -> const detail::PlyProperty* {
    auto it = by_name.find(name);
    if (it == by_name.end())
      fail(ErrorKind::schema_error,
           path.string() + ": missing property '" + name + "' required by the schema");
    return it->second;
  };

  const detail::PlyProperty* px = require("x");
  const detail::PlyProperty* py = require("y");
  const detail::PlyProperty* pz = require("z");

  std::vector<const detail::PlyProperty*> channel_props;
  for (const auto& g : schema) {
    if (g.width == 1) {
      channel_props.push_back(require(g.name));
    } else {
      for (std::size_t k = 0; k < g.width; ++k)
        channel_props.push_back(require(g.name + "_" + std::to_string(k)));
    }
  }
  const detail::PlyProperty* pimp = nullptr;
  if (auto it = by_name.find("importance"); it != by_name.end()) pimp = it->second;

  std::vector<unsigned char> payload(vertex_count * stride);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size())
    fail(ErrorKind::malformed_input,
         path.string() + ": vertex data truncated (expected " +
             std::to_string(payload.size()) + " bytes)");

  GaussianModel model;
  model.schema = schema;
  model.positions.resize(vertex_count);
  const std::size_t channels = schema_channel_count(schema);
  model.attributes.resize(channels * vertex_count);
  if (pimp) model.importance.resize(vertex_count);

  for (std::size_t i = 0; i < vertex_count; ++i) {
    const unsigned char* rec = payload.data() + i * stride;
    model.positions[i] = {detail::read_scalar(rec + px->offset, px->type),
                          detail::read_scalar(rec + py->offset, py->type),
                          detail::read_scalar(rec + pz->offset, pz->type)};
    for (std::size_t c = 0; c < channels; ++c) {
      const auto* p = channel_props[c];
      model.attributes[c * vertex_count + i] = detail::read_scalar(rec + p->offset, p->type);
    }
    if (pimp) model.importance[i] = detail::read_scalar(rec + pimp->offset, pimp->type);
  }
  model.validate();
  return model;
}

// Writes the model as binary little-endian PLY with float32 properties.
inline void save_model(const GaussianModel& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());

  const std::size_t n = model.point_count();
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << n << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  for (const auto& g : model.schema) {
    if (g.width == 1) {
      out << "property float " << g.name << "\n";
    } else {
      for (std::size_t k = 0; k < g.width; ++k)
        out << "property float " << g.name << "_" << k << "\n";
    }
  }
  if (!model.importance.empty()) out << "property float importance\n";
  out << "end_header\n";

  const std::size_t channels = model.channel_count();
  std::vector<float> rec(3 + channels + (model.importance.empty() ? 0 : 1));
  for (std::size_t i = 0; i < n; ++i) {
    rec[0] = static_cast<float>(model.positions[i][0]);
    rec[1] = static_cast<float>(model.positions[i][1]);
    rec[2] = static_cast<float>(model.positions[i][2]);
    for (std::size_t c = 0; c < channels; ++c)
      rec[3 + c] = static_cast<float>(model.attributes[c * n + i]);
    if (!model.importance.empty()) rec.back() = static_cast<float>(model.importance[i]);
    out.write(reinterpret_cast<const char*>(rec.data()),
              static_cast<std::streamsize>(rec.size() * sizeof(float)));
  }
  if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
}

}  // namespace sizegs
