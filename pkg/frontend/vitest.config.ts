import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // every bridge call spawns the CLI, so give suites generous room
    testTimeout: 120_000,
  },
});
