#include "vbasim/manifest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vbasim/errors.hpp"

namespace vbasim {

using Json = nlohmann::ordered_json;

namespace perm {

const std::vector<std::string>& dangerous() {
  static const std::vector<std::string> list = {
      std::string(kReadContacts),  std::string(kReadSms),     std::string(kReceiveSms),
      std::string(kReadPhoneState), std::string(kReadCallLog), std::string(kCamera),
      std::string(kRecordAudio),   std::string(kAccessFineLocation),
  };
  return list;
}

bool is_dangerous(std::string_view permission) {
  const auto& list = dangerous();
  return std::find(list.begin(), list.end(), permission) != list.end();
}

const std::vector<std::string>& all_known() {
  static const std::vector<std::string> list = [] {
    std::vector<std::string> out = dangerous();
    for (std::string_view extra :
         {kInternet, kInstallShortcut, kKillBackgroundProcesses,
          std::string_view("android.permission.ACCESS_NETWORK_STATE"),
          std::string_view("android.permission.ACCESS_WIFI_STATE"),
          std::string_view("android.permission.BLUETOOTH"),
          std::string_view("android.permission.BLUETOOTH_ADMIN"),
          std::string_view("android.permission.GET_TASKS"),
          std::string_view("android.permission.READ_EXTERNAL_STORAGE"),
          std::string_view("android.permission.RECEIVE_BOOT_COMPLETED"),
          std::string_view("android.permission.VIBRATE"),
          std::string_view("android.permission.WAKE_LOCK"),
          std::string_view("android.permission.WRITE_CONTACTS"),
          std::string_view("android.permission.WRITE_EXTERNAL_STORAGE")}) {
      out.emplace_back(extra);
    }
    return out;
  }();
  return list;
}

}  // namespace perm

std::string_view to_string(ComponentKind kind) noexcept {
  switch (kind) {
    case ComponentKind::Activity:
      return "Activity";
    case ComponentKind::Service:
      return "Service";
    case ComponentKind::Receiver:
      return "Receiver";
    case ComponentKind::Provider:
      return "Provider";
  }
  return "?";
}

ComponentKind component_kind_from_string(std::string_view text) {
  if (text == "Activity" || text == "activity" || text == "activities") return ComponentKind::Activity;
  if (text == "Service" || text == "service" || text == "services") return ComponentKind::Service;
  if (text == "Receiver" || text == "receiver" || text == "receivers") return ComponentKind::Receiver;
  if (text == "Provider" || text == "provider" || text == "providers") return ComponentKind::Provider;
  throw SchemaError("kind", "unknown component kind '" + std::string(text) + "'");
}

std::vector<Component>& AppManifest::components_of(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Activity:
      return activities;
    case ComponentKind::Service:
      return services;
    case ComponentKind::Receiver:
      return receivers;
    case ComponentKind::Provider:
      break;
  }
  return providers;
}

const std::vector<Component>& AppManifest::components_of(ComponentKind kind) const {
  return const_cast<AppManifest*>(this)->components_of(kind);
}

std::size_t AppManifest::component_count() const {
  return activities.size() + services.size() + receivers.size() + providers.size();
}

const Component* AppManifest::find_component(std::string_view name) const {
  for (const auto* list : {&activities, &services, &receivers, &providers}) {
    for (const auto& c : *list) {
      if (c.name == name) return &c;
    }
  }
  return nullptr;
}

const Component* AppManifest::launcher_activity() const {
  for (const auto& a : activities) {
    if (a.launcher) return &a;
  }
  return nullptr;
}

namespace {

constexpr std::array<std::pair<ComponentKind, const char*>, 4> kKindKeys = {{
    {ComponentKind::Activity, "activities"},
    {ComponentKind::Service, "services"},
    {ComponentKind::Receiver, "receivers"},
    {ComponentKind::Provider, "providers"},
}};

void reject_unknown_keys(const Json& object, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw SchemaError(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

const Json& require_object(const Json& value, const std::string& where) {
  if (!value.is_object()) throw SchemaError(where, "expected an object");
  return value;
}

std::string read_string(const Json& value, const std::string& where) {
  if (!value.is_string()) throw SchemaError(where, "expected a string");
  return value.get<std::string>();
}

std::vector<std::string> read_string_list(const Json& value, const std::string& where) {
  if (!value.is_array()) throw SchemaError(where, "expected a list of strings");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(read_string(value[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::set<std::string> read_string_set(const Json& value, const std::string& where) {
  auto list = read_string_list(value, where);
  return {list.begin(), list.end()};
}

bool read_bool(const Json& value, const std::string& where) {
  if (!value.is_boolean()) throw SchemaError(where, "expected a boolean");
  return value.get<bool>();
}

Component parse_component(const Json& value, ComponentKind kind, const std::string& where) {
  require_object(value, where);
  switch (kind) {
    case ComponentKind::Activity:
      reject_unknown_keys(value, {"name", "launcher", "stub"}, where);
      break;
    case ComponentKind::Service:
      reject_unknown_keys(value, {"name", "requires_permissions", "payload", "stub"}, where);
      break;
    case ComponentKind::Receiver:
      reject_unknown_keys(value, {"name", "intents"}, where);
      break;
    case ComponentKind::Provider:
      reject_unknown_keys(value, {"name", "stub"}, where);
      break;
  }
  Component c;
  c.kind = kind;
  if (!value.contains("name")) throw SchemaError(where + ".name", "missing required field");
  c.name = read_string(value["name"], where + ".name");
  if (c.name.empty()) throw SchemaError(where + ".name", "must not be empty");
  if (value.contains("launcher")) c.launcher = read_bool(value["launcher"], where + ".launcher");
  if (value.contains("stub")) c.stub = read_bool(value["stub"], where + ".stub");
  if (value.contains("intents")) c.intents = read_string_list(value["intents"], where + ".intents");
  if (value.contains("requires_permissions")) {
    c.requires_permissions =
        read_string_set(value["requires_permissions"], where + ".requires_permissions");
  }
  if (value.contains("payload")) c.payload = read_string(value["payload"], where + ".payload");
  return c;
}

Json component_to_json(const Component& c) {
  Json out = Json::object();
  out["name"] = c.name;
  if (c.launcher) out["launcher"] = true;
  if (c.stub) out["stub"] = true;
  if (c.kind == ComponentKind::Receiver && !c.intents.empty()) out["intents"] = c.intents;
  if (c.kind == ComponentKind::Service) {
    if (!c.requires_permissions.empty()) out["requires_permissions"] = c.requires_permissions;
    if (!c.payload.empty()) out["payload"] = c.payload;
  }
  return out;
}

}  // namespace

void validate_manifest(const AppManifest& m) {
  if (m.package.empty()) throw SchemaError("package", "must not be empty");
  if (m.version < 0) throw SchemaError("version", "must be a non-negative integer");
  std::set<std::string> seen;
  int launchers = 0;
  for (const auto& [kind, key] : kKindKeys) {
    for (const auto& c : m.components_of(kind)) {
      if (c.kind != kind) {
        throw SchemaError(std::string("components.") + key, "component '" + c.name + "' has kind " +
                                                                std::string(to_string(c.kind)));
      }
      if (c.name.empty()) throw SchemaError(std::string("components.") + key, "empty component name");
      if (!seen.insert(c.name).second) {
        throw DuplicateComponentError("duplicate component name '" + c.name + "' in " + m.package);
      }
      if (c.launcher) {
        if (kind != ComponentKind::Activity) {
          throw SchemaError(std::string("components.") + key, "only activities carry the launcher flag");
        }
        ++launchers;
      }
      if (kind != ComponentKind::Receiver && !c.intents.empty()) {
        throw SchemaError(std::string("components.") + key, "intents are only valid on receivers");
      }
      if (kind != ComponentKind::Service && (!c.requires_permissions.empty() || !c.payload.empty())) {
        throw SchemaError(std::string("components.") + key,
                          "requires_permissions/payload are only valid on services");
      }
      if (kind == ComponentKind::Receiver && c.stub) {
        throw SchemaError("components.receivers", "receivers cannot be stubs");
      }
    }
  }
  if (launchers > 1) {
    throw MultipleLauncherError(m.package + " declares " + std::to_string(launchers) +
                                " launcher activities");
  }
}

AppManifest parse_manifest(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("<document>", std::string("malformed document: ") + e.what());
  }
  require_object(doc, "<document>");
  reject_unknown_keys(doc,
                      {"package", "label", "version", "permissions", "features", "components",
                       "resources", "native_components"},
                      "");

  AppManifest m;
  if (!doc.contains("package")) throw SchemaError("package", "missing required field");
  m.package = read_string(doc["package"], "package");
  if (doc.contains("label")) m.label = read_string(doc["label"], "label");
  if (doc.contains("version")) {
    const Json& v = doc["version"];
    if (!v.is_number_integer()) throw SchemaError("version", "expected an integer");
    m.version = v.get<std::int64_t>();
  }
  if (doc.contains("permissions")) m.permissions = read_string_set(doc["permissions"], "permissions");
  if (doc.contains("features")) m.features = read_string_set(doc["features"], "features");
  if (doc.contains("components")) {
    const Json& comps = require_object(doc["components"], "components");
    reject_unknown_keys(comps, {"activities", "services", "receivers", "providers"}, "components");
    for (const auto& [kind, key] : kKindKeys) {
      if (!comps.contains(key)) continue;
      const std::string where = std::string("components.") + key;
      const Json& list = comps[key];
      if (!list.is_array()) throw SchemaError(where, "expected a list");
      auto& target = m.components_of(kind);
      for (std::size_t i = 0; i < list.size(); ++i) {
        target.push_back(parse_component(list[i], kind, where + "[" + std::to_string(i) + "]"));
      }
    }
  }
  if (doc.contains("resources")) {
    const Json& res = require_object(doc["resources"], "resources");
    reject_unknown_keys(res, {"launcher_icon", "shortcut_icon", "shortcut_label"}, "resources");
    if (res.contains("launcher_icon")) {
      m.launcher_icon = read_string(res["launcher_icon"], "resources.launcher_icon");
    }
    if (res.contains("shortcut_icon")) {
      m.shortcut_icon = read_string(res["shortcut_icon"], "resources.shortcut_icon");
    }
    if (res.contains("shortcut_label")) {
      m.shortcut_label = read_string(res["shortcut_label"], "resources.shortcut_label");
    }
  }
  if (doc.contains("native_components")) {
    m.native_components = read_string_set(doc["native_components"], "native_components");
  }
  validate_manifest(m);
  return m;
}

std::string serialize_manifest(const AppManifest& m) {
  Json doc = Json::object();
  doc["package"] = m.package;
  doc["label"] = m.label;
  doc["version"] = m.version;
  doc["permissions"] = m.permissions;
  doc["features"] = m.features;
  Json comps = Json::object();
  for (const auto& [kind, key] : kKindKeys) {
    Json list = Json::array();
    for (const auto& c : m.components_of(kind)) list.push_back(component_to_json(c));
    comps[key] = std::move(list);
  }
  doc["components"] = std::move(comps);
  Json res = Json::object();
  res["launcher_icon"] = m.launcher_icon;
  if (!m.shortcut_icon.empty()) res["shortcut_icon"] = m.shortcut_icon;
  if (!m.shortcut_label.empty()) res["shortcut_label"] = m.shortcut_label;
  doc["resources"] = std::move(res);
  doc["native_components"] = m.native_components;
  return doc.dump(2) + "\n";
}

AppManifest load_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path.string(), "cannot open manifest document");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_manifest(buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.filename().string() + ":" + e.field(),
                      std::string(e.what()).substr(e.field().size() + 2));
  }
}

void save_manifest_file(const AppManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_manifest(manifest);
  if (!out) throw Error("short write to " + path.string());
}

PermissionSet extract_permissions(const AppManifest& manifest) { return manifest.permissions; }

std::vector<ComponentRef> extract_components(const AppManifest& manifest) {
  std::vector<ComponentRef> out;
  out.reserve(manifest.component_count());
  for (const auto& [kind, key] : kKindKeys) {
    for (const auto& c : manifest.components_of(kind)) out.push_back({kind, c.name});
  }
  return out;
}

LauncherResources extract_launcher_resources(const AppManifest& manifest) {
  if (manifest.launcher_activity() == nullptr) {
    throw NoLauncherError(manifest.package + " declares no launcher activity");
  }
  return {manifest.launcher_icon, manifest.label};
}

ServiceCatalog ServiceCatalog::from_manifest(const AppManifest& manifest) {
  ServiceCatalog catalog;
  catalog.package = manifest.package;
  catalog.label = manifest.label;
  for (std::size_t i = 0; i < manifest.services.size(); ++i) {
    const auto& svc = manifest.services[i];
    const std::string where = "components.services[" + std::to_string(i) + "]";
    if (!svc.requires_permissions.contains(std::string(perm::kInternet))) {
      throw SchemaError(where + ".requires_permissions",
                        "catalog service '" + svc.name + "' must require INTERNET");
    }
    if (svc.payload.empty()) throw SchemaError(where + ".payload", "catalog service needs a payload store");
    catalog.entries.push_back(svc);
  }
  return catalog;
}

PermissionSet ServiceCatalog::permissions() const {
  PermissionSet out;
  for (const auto& e : entries) out.insert(e.requires_permissions.begin(), e.requires_permissions.end());
  return out;
}

}  // namespace vbasim
