import { ApiClient } from "./api.js";
import { mountChatApp } from "./app.js";

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  void mountChatApp(root, {
    api: new ApiClient(""),
    storage: window.localStorage,
  });
});
