import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 90_000,
    hookTimeout: 30_000,
    // The e2e suite drives one live gateway; keep files sequential.
    fileParallelism: false,
  },
});
