export * from "./grammar.js";
export * from "./spanSelect.js";
export * from "./viewState.js";
export * from "./reconciliation.js";
export * from "./api.js";
