// Entry point: wires the page to the live service on the same origin.

import { ApiClient } from "./api.js";
import { mountApp } from "./ui.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
mountApp(root, new ApiClient(), window.localStorage, (n) => {
  const bytes = new Uint8Array(n);
  crypto.getRandomValues(bytes);
  return bytes;
});
