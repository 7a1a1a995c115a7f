import { ApiClient } from "./api";
import { WizardApp } from "./ui";
import { WizardController } from "./wizard";

const base = new URLSearchParams(window.location.search).get("api") ?? "";
const root = document.querySelector<HTMLElement>("#app");
if (!root) throw new Error("missing #app container");

const app = new WizardApp(root, new WizardController(new ApiClient(base)));
void app.mount();
