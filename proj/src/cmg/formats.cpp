/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/formats.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cmg/error.hpp"

namespace cmg {

namespace {

std::string fmtDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream openOut(const std::string& path, std::ios::openmode extra = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | extra);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + path);
  return out;
}

std::ifstream openIn(const std::string& path, std::ios::openmode extra = {}) {
  std::ifstream in(path, std::ios::in | extra);
  if (!in) throw Error(ErrorCode::kIo, "cannot open for reading: " + path);
  return in;
}

void writePose16(std::ostream& out, const RigidTransform& pose) {
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << ' ' << fmtDouble(pose.R.m[r * 3 + c]);
    out << ' ' << fmtDouble(r == 0 ? pose.t.x : (r == 1 ? pose.t.y : pose.t.z));
  }
  out << " 0 0 0 1";
}

RigidTransform readPose16(std::istream& in, const std::string& what) {
  double v[16];
  for (double& x : v) {
    if (!(in >> x)) throw Error(ErrorCode::kParse, "truncated pose in " + what);
  }
  if (v[12] != 0.0 || v[13] != 0.0 || v[14] != 0.0 || v[15] != 1.0) {
    throw Error(ErrorCode::kParse, "bad homogeneous row in " + what);
  }
  RigidTransform pose;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) pose.R.m[r * 3 + c] = v[r * 4 + c];
  }
  pose.t = Vec3{v[3], v[7], v[11]};
  return pose;
}

void writeGraspFields(std::ostream& out, const GraspRecord& rec) {
  out << rec.id;
  writePose16(out, rec.pose);
  out << ' ' << fmtDouble(rec.spread);
  for (double v : rec.inner) out << ' ' << fmtDouble(v);
  for (const OrientedPoint& c : rec.contacts) {
    out << ' ' << fmtDouble(c.position.x) << ' ' << fmtDouble(c.position.y) << ' '
        << fmtDouble(c.position.z) << ' ' << fmtDouble(c.normal.x) << ' '
        << fmtDouble(c.normal.y) << ' ' << fmtDouble(c.normal.z);
  }
  for (int f = 0; f < 3; ++f) out << ' ' << fmtDouble(rec.x[f]) << ' ' << fmtDouble(rec.y[f]);
  out << ' ' << (rec.anchor + 1) << ' ' << fmtDouble(rec.epsilon);
}

GraspRecord readGraspFields(std::istream& in, const std::string& what) {
  GraspRecord rec;
  if (!(in >> rec.id)) throw Error(ErrorCode::kParse, "truncated grasp row in " + what);
  rec.pose = readPose16(in, what);
  auto num = [&](double* v) {
    if (!(in >> *v)) throw Error(ErrorCode::kParse, "truncated grasp row in " + what);
  };
  num(&rec.spread);
  for (double& v : rec.inner) num(&v);
  for (OrientedPoint& c : rec.contacts) {
    num(&c.position.x);
    num(&c.position.y);
    num(&c.position.z);
    num(&c.normal.x);
    num(&c.normal.y);
    num(&c.normal.z);
  }
  for (int f = 0; f < 3; ++f) {
    num(&rec.x[f]);
    num(&rec.y[f]);
  }
  int anchor = 0;
  if (!(in >> anchor)) throw Error(ErrorCode::kParse, "truncated grasp row in " + what);
  if (anchor < 1 || anchor > 3) throw Error(ErrorCode::kParse, "anchor out of range in " + what);
  rec.anchor = anchor - 1;
  num(&rec.epsilon);
  return rec;
}

const char* kGraspFieldList =
    "id pose(16,row-major) spread inner(3) "
    "contact_pos_normal(3x6) chart_xy(3x2) anchor epsilon";

void writeU32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

std::uint32_t readU32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw Error(ErrorCode::kParse, "truncated header in " + what);
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void writeF32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  writeU32(out, bits);
}

float readF32(std::istream& in, const std::string& what) {
  const std::uint32_t bits = readU32(in, what);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void writeU16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(b, 2);
}

std::uint16_t readU16(std::istream& in, const std::string& what) {
  unsigned char b[2];
  if (!in.read(reinterpret_cast<char*>(b), 2)) {
    throw Error(ErrorCode::kParse, "truncated record in " + what);
  }
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void expectMagic(std::istream& in, const char* magic, const std::string& what) {
  char got[4];
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw Error(ErrorCode::kParse, "bad magic in " + what);
  }
}

// Splits a header line "# key value..." into key and the remaining stream.
bool headerLine(const std::string& line, std::string* key, std::istringstream* rest) {
  if (line.empty() || line[0] != '#') return false;
  rest->str(line.substr(1));
  rest->clear();
  return static_cast<bool>(*rest >> *key);
}

}  // namespace

void saveAnnotations(const std::string& path, const AnnotationSet& set) {
  std::ofstream out = openOut(path);
  out << "# object " << set.objectId << '\n';
  out << "# mesh " << set.meshPath << '\n';
  out << "# scale " << fmtDouble(set.scale) << '\n';
  out << "# hand " << set.handPath << '\n';
  out << "# tau " << fmtDouble(set.tau) << '\n';
  out << "# mu " << fmtDouble(set.mu) << '\n';
  out << "# cone_edges " << set.coneEdges << '\n';
  out << "# lambda " << fmtDouble(set.lambda) << '\n';
  out << "# torque_origin " << fmtDouble(set.torqueOrigin.x) << ' '
      << fmtDouble(set.torqueOrigin.y) << ' ' << fmtDouble(set.torqueOrigin.z) << '\n';
  out << "# seed " << set.seed << '\n';
  out << "# sample_voxel " << fmtDouble(set.sampleVoxel) << '\n';
  auto list = [&](const char* name, const std::vector<double>& vs) {
    out << "# " << name;
    for (double v : vs) out << ' ' << fmtDouble(v);
    out << '\n';
  };
  list("depths", set.depths);
  list("rolls", set.rolls);
  list("spreads", set.spreads);
  out << "# fields " << kGraspFieldList << '\n';
  for (const GraspRecord& rec : set.grasps) {
    writeGraspFields(out, rec);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

AnnotationSet loadAnnotations(const std::string& path) {
  std::ifstream in = openIn(path);
  AnnotationSet set;
  set.depths.clear();
  set.rolls.clear();
  set.spreads.clear();
  std::string line;
  while (std::getline(in, line)) {
    std::string key;
    std::istringstream rest;
    if (headerLine(line, &key, &rest)) {
      auto numbers = [&](std::vector<double>* vs) {
        double v;
        while (rest >> v) vs->push_back(v);
      };
      if (key == "object") rest >> set.objectId;
      else if (key == "mesh") rest >> set.meshPath;
      else if (key == "scale") rest >> set.scale;
      else if (key == "hand") rest >> set.handPath;
      else if (key == "tau") rest >> set.tau;
      else if (key == "mu") rest >> set.mu;
      else if (key == "cone_edges") rest >> set.coneEdges;
      else if (key == "lambda") rest >> set.lambda;
      else if (key == "torque_origin")
        rest >> set.torqueOrigin.x >> set.torqueOrigin.y >> set.torqueOrigin.z;
      else if (key == "seed") rest >> set.seed;
      else if (key == "sample_voxel") rest >> set.sampleVoxel;
      else if (key == "depths") numbers(&set.depths);
      else if (key == "rolls") numbers(&set.rolls);
      else if (key == "spreads") numbers(&set.spreads);
      // Unknown header keys are ignored.
      continue;
    }
    std::istringstream row(line);
    std::string probe;
    if (!(row >> probe)) continue;  // blank line
    row.seekg(0);
    row.clear();
    set.grasps.push_back(readGraspFields(row, path));
  }
  return set;
}

std::vector<RegistryEntry> loadRegistry(const std::string& path) {
  std::ifstream in = openIn(path);
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  std::vector<RegistryEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    RegistryEntry entry;
    if (!(row >> entry.id)) continue;
    if (entry.id[0] == '#') continue;
    if (!(row >> entry.meshPath >> entry.scale)) {
      throw Error(ErrorCode::kParse, "bad registry row in " + path + ": " + line);
    }
    if (!(entry.scale > 0.0)) {
      throw Error(ErrorCode::kParse, "bad scale in " + path + ": " + line);
    }
    std::filesystem::path mesh(entry.meshPath);
    if (mesh.is_relative()) entry.meshPath = (dir / mesh).string();
    entries.push_back(std::move(entry));
  }
  if (entries.empty()) throw Error(ErrorCode::kParse, "empty registry: " + path);
  return entries;
}

void saveScene(const std::string& path, const Scene& scene) {
  std::ofstream out = openOut(path);
  out << "# fields object id mesh_path scale pose(16,row-major)\n";
  for (const SceneObject& obj : scene.objects) {
    out << "object " << obj.id << ' ' << obj.meshPath << ' ' << fmtDouble(obj.scale);
    writePose16(out, obj.pose);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

Scene loadScene(const std::string& path) {
  std::ifstream in = openIn(path);
  Scene scene;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string tag;
    if (!(row >> tag) || tag[0] == '#') continue;
    if (tag != "object") throw Error(ErrorCode::kParse, "bad scene row in " + path + ": " + line);
    SceneObject obj;
    if (!(row >> obj.id >> obj.meshPath >> obj.scale)) {
      throw Error(ErrorCode::kParse, "bad scene row in " + path + ": " + line);
    }
    obj.pose = readPose16(row, path);
    scene.objects.push_back(std::move(obj));
  }
  return scene;
}

void saveDepth(const std::string& path, const DepthImage& image) {
  if (image.width < 0 || image.height < 0 ||
      image.values.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw Error(ErrorCode::kInvalidArg, "saveDepth: inconsistent image");
  }
  std::ofstream out = openOut(path, std::ios::binary);
  out.write("CMGD", 4);
  writeU32(out, static_cast<std::uint32_t>(image.width));
  writeU32(out, static_cast<std::uint32_t>(image.height));
  for (float v : image.values) writeF32(out, v);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

DepthImage loadDepth(const std::string& path) {
  std::ifstream in = openIn(path, std::ios::binary);
  expectMagic(in, "CMGD", path);
  DepthImage image;
  image.width = static_cast<int>(readU32(in, path));
  image.height = static_cast<int>(readU32(in, path));
  if (image.width < 0 || image.height < 0 || image.width > 1 << 16 || image.height > 1 << 16) {
    throw Error(ErrorCode::kParse, "implausible size in " + path);
  }
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  image.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) image.values[i] = readF32(in, path);
  return image;
}

void saveLabels(const std::string& path, const PointCloud& cloud,
                const std::vector<PointLabel>& labels) {
  if (cloud.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArg, "saveLabels: cloud and labels disagree");
  }
  std::ofstream out = openOut(path, std::ios::binary);
  out.write("CMGL", 4);
  writeU32(out, static_cast<std::uint32_t>(cloud.size()));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const OrientedPoint& p = cloud[i];
    const PointLabel& l = labels[i];
    writeF32(out, static_cast<float>(p.position.x));
    writeF32(out, static_cast<float>(p.position.y));
    writeF32(out, static_cast<float>(p.position.z));
    writeF32(out, static_cast<float>(p.normal.x));
    writeF32(out, static_cast<float>(p.normal.y));
    writeF32(out, static_cast<float>(p.normal.z));
    out.put(static_cast<char>(l.contact));
    out.put(static_cast<char>(l.finger));
    writeF32(out, l.x);
    writeF32(out, l.y);
    for (int j = 0; j < 4; ++j) {
      writeU16(out, l.bins[j]);
      writeF32(out, l.res[j]);
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

void loadLabels(const std::string& path, PointCloud* cloud, std::vector<PointLabel>* labels) {
  std::ifstream in = openIn(path, std::ios::binary);
  expectMagic(in, "CMGL", path);
  const std::uint32_t n = readU32(in, path);
  cloud->clear();
  labels->clear();
  cloud->reserve(n);
  labels->reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    OrientedPoint p;
    p.position.x = readF32(in, path);
    p.position.y = readF32(in, path);
    p.position.z = readF32(in, path);
    p.normal.x = readF32(in, path);
    p.normal.y = readF32(in, path);
    p.normal.z = readF32(in, path);
    PointLabel l;
    int c = in.get();
    int f = in.get();
    if (c < 0 || f < 0) throw Error(ErrorCode::kParse, "truncated record in " + path);
    l.contact = static_cast<std::uint8_t>(c);
    l.finger = static_cast<std::uint8_t>(f);
    l.x = readF32(in, path);
    l.y = readF32(in, path);
    for (int j = 0; j < 4; ++j) {
      l.bins[j] = readU16(in, path);
      l.res[j] = readF32(in, path);
    }
    cloud->push_back(p);
    labels->push_back(l);
  }
}

void saveCaptureGrasps(const std::string& path, const std::vector<CaptureGraspRow>& rows) {
  std::ofstream out = openOut(path);
  out << "# fields object_id " << kGraspFieldList << '\n';
  for (const CaptureGraspRow& row : rows) {
    out << row.objectId << ' ';
    writeGraspFields(out, row.record);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

std::vector<CaptureGraspRow> loadCaptureGrasps(const std::string& path) {
  std::ifstream in = openIn(path);
  std::vector<CaptureGraspRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    CaptureGraspRow r;
    if (!(row >> r.objectId)) continue;
    if (r.objectId[0] == '#') continue;
    r.record = readGraspFields(row, path);
    rows.push_back(std::move(r));
  }
  return rows;
}

void saveCaptureManifest(const std::string& path, const CaptureManifest& m) {
  std::ofstream out = openOut(path);
  out << "scene " << m.scenePath << '\n';
  out << "hand " << m.handPath << '\n';
  out << "width " << m.intrinsics.width << '\n';
  out << "height " << m.intrinsics.height << '\n';
  out << "fx " << fmtDouble(m.intrinsics.fx) << '\n';
  out << "fy " << fmtDouble(m.intrinsics.fy) << '\n';
  out << "cx " << fmtDouble(m.intrinsics.cx) << '\n';
  out << "cy " << fmtDouble(m.intrinsics.cy) << '\n';
  out << "camera_pose";
  writePose16(out, m.cameraPose);
  out << '\n';
  out << "depth " << m.depthPath << '\n';
  out << "grasps " << m.graspsPath << '\n';
  out << "labels " << m.labelsPath << '\n';
  out << "points " << m.points << '\n';
  out << "seed " << m.seed << '\n';
  out << "contact_radius " << fmtDouble(m.labelParams.contactRadius) << '\n';
  out << "normal_angle_max " << fmtDouble(m.labelParams.normalAngleMax) << '\n';
  auto bins = [&](const char* name, const BinSpec& spec) {
    out << name << ' ' << fmtDouble(spec.lo) << ' ' << fmtDouble(spec.hi) << ' ' << spec.bins
        << '\n';
  };
  bins("main_bins", m.labelParams.mainBins);
  bins("spread_bins", m.labelParams.spreadBins);
  bins("support_bins", m.labelParams.supportBins);
  out << "annotations_total " << m.counts.total << '\n';
  out << "annotations_kept " << m.counts.kept << '\n';
  out << "removed_collision " << m.counts.removedCollision << '\n';
  out << "removed_invalid_pose " << m.counts.removedInvalidPose << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

CaptureManifest loadCaptureManifest(const std::string& path) {
  std::ifstream in = openIn(path);
  CaptureManifest m;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string key;
    if (!(row >> key) || key[0] == '#') continue;
    if (key == "scene") row >> m.scenePath;
    else if (key == "hand") row >> m.handPath;
    else if (key == "width") row >> m.intrinsics.width;
    else if (key == "height") row >> m.intrinsics.height;
    else if (key == "fx") row >> m.intrinsics.fx;
    else if (key == "fy") row >> m.intrinsics.fy;
    else if (key == "cx") row >> m.intrinsics.cx;
    else if (key == "cy") row >> m.intrinsics.cy;
    else if (key == "camera_pose") m.cameraPose = readPose16(row, path);
    else if (key == "depth") row >> m.depthPath;
    else if (key == "grasps") row >> m.graspsPath;
    else if (key == "labels") row >> m.labelsPath;
    else if (key == "points") row >> m.points;
    else if (key == "seed") row >> m.seed;
    else if (key == "contact_radius") row >> m.labelParams.contactRadius;
    else if (key == "normal_angle_max") row >> m.labelParams.normalAngleMax;
    else if (key == "main_bins")
      row >> m.labelParams.mainBins.lo >> m.labelParams.mainBins.hi >> m.labelParams.mainBins.bins;
    else if (key == "spread_bins")
      row >> m.labelParams.spreadBins.lo >> m.labelParams.spreadBins.hi >>
          m.labelParams.spreadBins.bins;
    else if (key == "support_bins")
      row >> m.labelParams.supportBins.lo >> m.labelParams.supportBins.hi >>
          m.labelParams.supportBins.bins;
    else if (key == "annotations_total") row >> m.counts.total;
    else if (key == "annotations_kept") row >> m.counts.kept;
    else if (key == "removed_collision") row >> m.counts.removedCollision;
    else if (key == "removed_invalid_pose") row >> m.counts.removedInvalidPose;
    // Unknown keys are ignored.
  }
  return m;
}

}  // namespace cmg
