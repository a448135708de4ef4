/** Page bootstrap: build the document view, start the controller,
 * bind the static inputs. Everything dynamic goes through dom.ts. */
import { Controller } from "./controller.js";
import { buildView } from "./dom.js";

let ctrl: Controller;

const view = buildView(document, {
  onToggle: (j) => ctrl.onToggle(j),
  onPreset: (label) => ctrl.onPreset(label),
  onHistory: (include) => ctrl.onHistory(include),
});

ctrl = new Controller(view, (input, init) => fetch(input, init));

const slider = document.querySelector<HTMLInputElement>("#step-slider");
slider?.addEventListener("input", () => ctrl.onStep(Number(slider.value)));

document
  .querySelector("#apply-step")
  ?.addEventListener("click", () => ctrl.onApplyStep());

document
  .querySelector("#retry")
  ?.addEventListener("click", () => void ctrl.retry());

void ctrl.start();
