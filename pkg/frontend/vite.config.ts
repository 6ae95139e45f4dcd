import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    // the dev server proxies API calls to a locally running service
    proxy: {
      "/v1": "http://127.0.0.1:8765",
    },
  },
  test: {
    environment: "node",
    include: ["test/**/*.test.ts"],
  },
});
