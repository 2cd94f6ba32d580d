import { ApiClient } from "./api.js";
import { ReviewController } from "./controller.js";
import { DraftStore } from "./drafts.js";
import { mountApp } from "./render.js";

// Served from anywhere; ?api=http://host:port points at the QC service,
// default is same origin.
const base = new URLSearchParams(window.location.search).get("api") ?? "";

const controller = new ReviewController({
  api: new ApiClient(base),
  drafts: new DraftStore(window.localStorage),
});

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app mount point");
mountApp(root, controller);
void controller.loadQueue();
